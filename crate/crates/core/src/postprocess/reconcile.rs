use rand::seq::SliceRandom;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::PostprocessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconciliationReport {
    pub corrected_key_a: Vec<u8>,
    pub corrected_key_b: Vec<u8>,
    /// Parity bits announced over the public channel.
    pub disclosed_bits: usize,
    /// Remaining disagreements, computed from both keys. Test-only; never public.
    pub residual_mismatch: usize,
    pub passes: usize,
}

fn parity(key: &[u8], positions: &[usize]) -> u8 {
    positions.iter().fold(0, |acc, &i| acc ^ (key[i] & 1))
}

/// Block-parity reconciliation with bisection, Bob's key is corrected towards
/// Alice's.
///
/// Each pass splits a permutation of the positions (identity in the first
/// pass, seeded shuffles afterwards) into blocks of `block_size`, compares one
/// parity per block and bisects every disagreeing block down to a single bit,
/// which Bob flips. All `max_passes` passes run.
pub fn reconcile(
    key_a: &[u8],
    key_b: &[u8],
    block_size: usize,
    max_passes: usize,
    rng: &mut dyn RngCore,
) -> Result<ReconciliationReport, PostprocessError> {
    if key_a.len() != key_b.len() {
        return Err(PostprocessError::LengthMismatch {
            a: key_a.len(),
            b: key_b.len(),
        });
    }
    if block_size < 2 {
        return Err(PostprocessError::BlockTooSmall(block_size));
    }
    let mut bob = key_b.to_vec();
    let mut order: Vec<usize> = (0..key_a.len()).collect();
    let mut disclosed = 0;

    for pass in 0..max_passes {
        if pass > 0 {
            order.shuffle(rng);
        }
        for block in order.chunks(block_size) {
            disclosed += 1;
            if parity(key_a, block) == parity(&bob, block) {
                continue;
            }
            let mut span = block;
            while span.len() > 1 {
                let (left, right) = span.split_at(span.len() / 2);
                disclosed += 1;
                span = if parity(key_a, left) != parity(&bob, left) {
                    left
                } else {
                    right
                };
            }
            bob[span[0]] ^= 1;
        }
    }

    let residual_mismatch = key_a.iter().zip(&bob).filter(|(a, b)| a != b).count();
    Ok(ReconciliationReport {
        corrected_key_a: key_a.to_vec(),
        corrected_key_b: bob,
        disclosed_bits: disclosed,
        residual_mismatch,
        passes: max_passes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use rand::Rng;

    #[test]
    fn identical_keys_one_pass() {
        let mut rng = rng_from_seed(1);
        let key: Vec<u8> = (0..128).map(|_| rng.random_range(0..2)).collect();
        let r = reconcile(&key, &key, 16, 1, &mut rng).unwrap();
        assert_eq!(r.residual_mismatch, 0);
        assert_eq!(r.disclosed_bits, 8);
        assert_eq!(r.corrected_key_b, key);
    }

    #[test]
    fn single_error_costs_block_plus_bisection() {
        let mut rng = rng_from_seed(2);
        let a: Vec<u8> = (0..64).map(|_| rng.random_range(0..2)).collect();
        for pos in [0, 17, 63] {
            let mut b = a.clone();
            b[pos] ^= 1;
            let r = reconcile(&a, &b, 8, 1, &mut rng).unwrap();
            assert_eq!(r.residual_mismatch, 0);
            // 8 block parities + log₂ 8 bisection parities.
            assert_eq!(r.disclosed_bits, 11);
        }
    }

    #[test]
    fn ragged_last_block() {
        let mut rng = rng_from_seed(3);
        let a = vec![0u8; 21];
        let mut b = a.clone();
        b[20] = 1;
        let r = reconcile(&a, &b, 8, 1, &mut rng).unwrap();
        assert_eq!(r.residual_mismatch, 0);
        // ceil(21/8) = 3 blocks; the last has 5 bits and the error sits in its
        // larger halves all the way down: 5 → 3 → 2 → 1.
        assert_eq!(r.disclosed_bits, 3 + 3);
    }

    #[test]
    fn errors_on_bad_input() {
        let mut rng = rng_from_seed(0);
        assert!(matches!(
            reconcile(&[0, 1], &[0], 4, 1, &mut rng),
            Err(PostprocessError::LengthMismatch { .. })
        ));
        assert!(matches!(
            reconcile(&[0, 1], &[0, 1], 1, 1, &mut rng),
            Err(PostprocessError::BlockTooSmall(1))
        ));
    }
}
