use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

/// Random 0/1 string of length `n` whose zeros occur with probability `p_zero`.
///
/// With `exact` set the string holds exactly `round(p_zero * n)` zeros in
/// uniformly random positions; otherwise each entry is an independent draw.
pub fn sample_choice_string(n: usize, p_zero: f64, exact: bool, rng: &mut dyn RngCore) -> Vec<u8> {
    let p_zero = p_zero.clamp(0.0, 1.0);
    if exact {
        let zeros = ((p_zero * n as f64).round() as usize).min(n);
        let mut bits = vec![0u8; zeros];
        bits.resize(n, 1);
        bits.shuffle(rng);
        bits
    } else {
        (0..n).map(|_| u8::from(!rng.random_bool(p_zero))).collect()
    }
}
