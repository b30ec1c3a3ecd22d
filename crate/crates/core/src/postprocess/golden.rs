//! Golden vectors for privacy amplification.
//!
//! One vector per line, whitespace separated:
//!
//! ```text
//! <key hex> <seed decimal> <m decimal> <expected output hex>
//! ```
//!
//! Bit strings are packed most significant bit first; the key is `8 × bytes`
//! bits long and the output is zero-padded to a whole byte. Lines starting
//! with `#` and blank lines are ignored.

use super::{privacy_amplify, PostprocessError};

/// The vectors shipped with the crate.
pub const BUNDLED_GOLDEN: &str = include_str!("../../testdata/privacy_amplification.golden");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenVector {
    pub line: usize,
    pub key: Vec<u8>,
    pub seed: u64,
    pub m: usize,
    pub expected_hex: String,
}

pub fn bits_to_hex(bits: &[u8]) -> String {
    let bytes: Vec<u8> = bits
        .chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | ((b & 1) << (7 - i)))
        })
        .collect();
    hex::encode(bytes)
}

pub fn hex_to_bits(text: &str) -> Result<Vec<u8>, hex::FromHexError> {
    let bytes = hex::decode(text)?;
    Ok(bytes
        .iter()
        .flat_map(|byte| (0..8).rev().map(move |i| (byte >> i) & 1))
        .collect())
}

pub fn parse_golden(text: &str) -> Result<Vec<GoldenVector>, PostprocessError> {
    let mut vectors = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let err = |message: String| PostprocessError::Golden { line, message };
        let fields: Vec<&str> = content.split_whitespace().collect();
        let [key_hex, seed, m, expected] = fields[..] else {
            return Err(err(format!("expected 4 fields, found {}", fields.len())));
        };
        vectors.push(GoldenVector {
            line,
            key: hex_to_bits(key_hex).map_err(|e| err(format!("key: {e}")))?,
            seed: seed.parse().map_err(|e| err(format!("seed: {e}")))?,
            m: m.parse().map_err(|e| err(format!("m: {e}")))?,
            expected_hex: expected.to_ascii_lowercase(),
        });
    }
    Ok(vectors)
}

/// Recomputes every vector in `text`; returns how many were checked.
pub fn verify_golden(text: &str) -> Result<usize, PostprocessError> {
    let vectors = parse_golden(text)?;
    for v in &vectors {
        let out = privacy_amplify(&v.key, v.m, v.seed).map_err(|e| PostprocessError::Golden {
            line: v.line,
            message: e.to_string(),
        })?;
        let got = bits_to_hex(&out);
        if got != v.expected_hex {
            return Err(PostprocessError::Golden {
                line: v.line,
                message: format!("expected {} but computed {got}", v.expected_hex),
            });
        }
    }
    Ok(vectors.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_packing() {
        assert_eq!(bits_to_hex(&[1, 0, 1, 0, 0, 0, 0, 1]), "a1");
        assert_eq!(bits_to_hex(&[1, 1, 1]), "e0");
        assert_eq!(hex_to_bits("a1").unwrap(), vec![1, 0, 1, 0, 0, 0, 0, 1]);
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(
            parse_golden("ab 1 2"),
            Err(PostprocessError::Golden { line: 1, .. })
        ));
        assert!(matches!(
            parse_golden("# c\nzz 1 2 00"),
            Err(PostprocessError::Golden { line: 2, .. })
        ));
    }

    #[test]
    fn mismatch_reported() {
        let err = verify_golden("00 1 4 f0").unwrap_err();
        assert!(matches!(err, PostprocessError::Golden { line: 1, .. }));
    }

    #[test]
    fn bundled_vectors_verify() {
        assert!(verify_golden(BUNDLED_GOLDEN).unwrap() >= 4);
    }
}
