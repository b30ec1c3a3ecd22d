//! Classical post-processing of the INFO bits: parity-based reconciliation,
//! leakage accounting and Toeplitz-hash privacy amplification.

mod golden;
mod hash;
mod reconcile;

use serde::{Deserialize, Serialize};

use crate::protocol::RunResult;
use crate::seed::rng_from_seed;

pub use golden::{bits_to_hex, hex_to_bits, parse_golden, verify_golden, GoldenVector, BUNDLED_GOLDEN};
pub use hash::{privacy_amplify, HashSeedMatrix};
pub use reconcile::{reconcile, ReconciliationReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PostprocessError {
    #[error("key lengths differ ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("block size must be at least 2, got {0}")]
    BlockTooSmall(usize),
    #[error("output length {m} exceeds input length {n}")]
    OutputTooLong { m: usize, n: usize },
    #[error("golden file line {line}: {message}")]
    Golden { line: usize, message: String },
}

/// Binary entropy in bits, with `h₂(0) = h₂(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// `max(0, ⌊n·(1 − 2·h₂(q))⌋ − disclosed − margin)`.
pub fn final_key_length(n_info: usize, observed_qber: f64, disclosed_bits: usize, safety_margin: usize) -> usize {
    let secret = (n_info as f64 * (1.0 - 2.0 * binary_entropy(observed_qber))).floor() as i64;
    let len = secret - disclosed_bits as i64 - safety_margin as i64;
    len.max(0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistillParams {
    pub block_size: usize,
    pub max_passes: usize,
    pub safety_margin: usize,
    /// Seeds both the reconciliation shuffles and the hash matrix.
    pub seed: u64,
}

impl Default for DistillParams {
    fn default() -> Self {
        DistillParams {
            block_size: 16,
            max_passes: 4,
            safety_margin: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistilledKey {
    pub alice_key: Vec<u8>,
    pub bob_key: Vec<u8>,
    pub reconciliation: ReconciliationReport,
    pub length: usize,
}

/// Reconciles and compresses the INFO bits of a completed run. Returns `None`
/// for aborted runs. On success `run.final_key` holds Alice's key.
pub fn distill(run: &mut RunResult, params: &DistillParams) -> Result<Option<DistilledKey>, PostprocessError> {
    if run.aborted {
        run.final_key = None;
        return Ok(None);
    }
    let mut rng = rng_from_seed(params.seed);
    let report = reconcile(
        &run.alice_sifted,
        &run.bob_sifted,
        params.block_size,
        params.max_passes,
        &mut rng,
    )?;
    let qber = run.error_rates.test.rate();
    let length = if qber >= 0.5 {
        0
    } else {
        final_key_length(
            run.alice_sifted.len(),
            qber,
            report.disclosed_bits,
            params.safety_margin,
        )
    };
    let alice_key = privacy_amplify(&report.corrected_key_a, length, params.seed)?;
    let bob_key = privacy_amplify(&report.corrected_key_b, length, params.seed)?;
    run.final_key = Some(alice_key.clone());
    Ok(Some(DistilledKey {
        alice_key,
        bob_key,
        reconciliation: report,
        length,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.11) - 0.499_915).abs() < 1e-5);
    }

    #[test]
    fn key_length_examples() {
        assert_eq!(final_key_length(1000, 0.0, 0, 0), 1000);
        // 1 − 2·h₂(0.11) ≈ 1.7e-4, so ⌊1000·…⌋ = 0.
        assert_eq!(final_key_length(1000, 0.11, 0, 0), 0);
        assert_eq!(final_key_length(1000, 0.11, 0, 20), 0);
        assert_eq!(final_key_length(1000, 0.0, 80, 20), 900);
        assert_eq!(final_key_length(10, 0.0, 80, 20), 0);
        assert_eq!(final_key_length(1000, 0.3, 0, 0), 0);
    }
}
