use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::PostprocessError;
use crate::seed::rng_from_seed;

/// An `rows × cols` Toeplitz matrix over GF(2), fully determined by its seed.
///
/// Entry `(r, c)` is bit `c − r + rows − 1` of a diagonal string of
/// `rows + cols − 1` bits drawn from a ChaCha8 stream seeded with `seed`
/// (64-bit words, least significant bit first).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashSeedMatrix {
    seed: u64,
    rows: usize,
    cols: usize,
    diagonal: Vec<u64>,
}

impl HashSeedMatrix {
    pub fn new(seed: u64, rows: usize, cols: usize) -> Result<Self, PostprocessError> {
        if rows > cols {
            return Err(PostprocessError::OutputTooLong { m: rows, n: cols });
        }
        let bits = if rows == 0 { 0 } else { rows + cols - 1 };
        let words = bits.div_ceil(64);
        let mut rng = rng_from_seed(seed);
        let mut diagonal: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
        if bits % 64 != 0 {
            if let Some(last) = diagonal.last_mut() {
                *last &= (1u64 << (bits % 64)) - 1;
            }
        }
        Ok(HashSeedMatrix {
            seed,
            rows,
            cols,
            diagonal,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> u8 {
        let pos = col + self.rows - 1 - row;
        ((self.diagonal[pos / 64] >> (pos % 64)) & 1) as u8
    }

    /// 64 diagonal bits starting at `pos`; bits past the end read as zero.
    fn window(&self, pos: usize) -> u64 {
        let (q, s) = (pos / 64, pos % 64);
        let lo = self.diagonal.get(q).copied().unwrap_or(0) >> s;
        let hi = if s == 0 {
            0
        } else {
            self.diagonal.get(q + 1).copied().unwrap_or(0) << (64 - s)
        };
        lo | hi
    }

    /// Matrix-vector product over GF(2).
    pub fn apply(&self, key: &[u8]) -> Result<Vec<u8>, PostprocessError> {
        if key.len() != self.cols {
            return Err(PostprocessError::LengthMismatch {
                a: self.cols,
                b: key.len(),
            });
        }
        let mut packed = vec![0u64; key.len().div_ceil(64)];
        for (j, &bit) in key.iter().enumerate() {
            packed[j / 64] |= u64::from(bit & 1) << (j % 64);
        }
        let out = (0..self.rows)
            .map(|r| {
                let offset = self.rows - 1 - r;
                let acc = packed
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (w, &k)| acc ^ (self.window(offset + 64 * w) & k));
                (acc.count_ones() & 1) as u8
            })
            .collect();
        Ok(out)
    }
}

/// Compresses `key` to `m` bits with the Toeplitz matrix seeded by `seed`.
pub fn privacy_amplify(key: &[u8], m: usize, seed: u64) -> Result<Vec<u8>, PostprocessError> {
    HashSeedMatrix::new(seed, m, key.len())?.apply(key)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Straight row-by-column product using `entry`.
    fn naive(matrix: &HashSeedMatrix, key: &[u8]) -> Vec<u8> {
        (0..matrix.rows())
            .map(|r| (0..matrix.cols()).fold(0u8, |acc, c| acc ^ (matrix.entry(r, c) & key[c])))
            .collect()
    }

    #[test]
    fn zero_key_hashes_to_zero() {
        for seed in [0, 1, u64::MAX] {
            assert_eq!(privacy_amplify(&[0; 200], 77, seed).unwrap(), vec![0; 77]);
        }
    }

    #[test]
    fn toeplitz_structure() {
        let m = HashSeedMatrix::new(9, 20, 90).unwrap();
        for r in 1..20 {
            for c in 1..90 {
                assert_eq!(m.entry(r, c), m.entry(r - 1, c - 1));
            }
        }
    }

    #[test]
    fn output_longer_than_input_rejected() {
        assert_eq!(
            privacy_amplify(&[1, 0, 1], 4, 0),
            Err(PostprocessError::OutputTooLong { m: 4, n: 3 })
        );
        assert_eq!(privacy_amplify(&[1, 0, 1], 0, 0).unwrap(), Vec::<u8>::new());
    }

    proptest! {
        #[test]
        fn packed_product_matches_naive(
            key in prop::collection::vec(0u8..2, 1..300),
            frac in 0.0f64..=1.0,
            seed in any::<u64>(),
        ) {
            let m = (key.len() as f64 * frac) as usize;
            let matrix = HashSeedMatrix::new(seed, m, key.len()).unwrap();
            prop_assert_eq!(matrix.apply(&key).unwrap(), naive(&matrix, &key));
        }

        #[test]
        fn hash_is_linear(
            pair in (1usize..400).prop_flat_map(|n| (
                prop::collection::vec(0u8..2, n),
                prop::collection::vec(0u8..2, n),
            )),
            seed in any::<u64>(),
        ) {
            let (k1, k2) = pair;
            let m = k1.len() / 2;
            let x: Vec<u8> = k1.iter().zip(&k2).map(|(a, b)| a ^ b).collect();
            let h1 = privacy_amplify(&k1, m, seed).unwrap();
            let h2 = privacy_amplify(&k2, m, seed).unwrap();
            let hx = privacy_amplify(&x, m, seed).unwrap();
            let combined: Vec<u8> = h1.iter().zip(&h2).map(|(a, b)| a ^ b).collect();
            prop_assert_eq!(hx, combined);
        }
    }
}
