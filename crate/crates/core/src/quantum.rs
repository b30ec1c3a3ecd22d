//! Statevector engine for one channel qubit, optionally joined with one
//! eavesdropper probe qubit.
//!
//! The channel qubit is always the first tensor factor. When a probe is
//! attached the amplitude of `|c p⟩` lives at index `2 * c + p`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest tolerated deviation of `Σ|a|²` from one before a measurement is refused.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Largest tolerated entry of `U·U† − I` for a matrix to count as unitary.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// Outcomes below this probability are never sampled.
const NEGLIGIBLE_PROBABILITY: f64 = 1e-15;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("qubit {0} is not part of this state")]
    UnknownRole(Role),
    #[error("state is not normalized (norm² = {norm_sq})")]
    NotNormalized { norm_sq: f64 },
    #[error("matrix is not unitary (max |U·U† − I| entry = {deviation:e})")]
    NonUnitary { deviation: f64 },
    #[error("matrix dimension {got} does not match {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("a probe qubit is already attached")]
    ProbeAlreadyAttached,
    #[error("expected 2 or 4 amplitudes, got {0}")]
    InvalidAmplitudeCount(usize),
    #[error("target list repeats qubit {0}")]
    RepeatedTarget(Role),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub fn other(self) -> Basis {
        match self {
            Basis::Z => Basis::X,
            Basis::X => Basis::Z,
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Z => f.write_str("Z"),
            Basis::X => f.write_str("X"),
        }
    }
}

/// One of the four BB84 states: `(Z,0)=|0⟩`, `(Z,1)=|1⟩`, `(X,0)=|+⟩`, `(X,1)=|−⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateLabel {
    pub basis: Basis,
    pub bit: u8,
}

impl StateLabel {
    pub const fn new(basis: Basis, bit: u8) -> Self {
        StateLabel { basis, bit }
    }

    pub const ZERO: StateLabel = StateLabel::new(Basis::Z, 0);
    pub const ONE: StateLabel = StateLabel::new(Basis::Z, 1);
    pub const PLUS: StateLabel = StateLabel::new(Basis::X, 0);
    pub const MINUS: StateLabel = StateLabel::new(Basis::X, 1);

    fn amplitudes(self) -> [Complex64; 2] {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match (self.basis, self.bit & 1) {
            (Basis::Z, 0) => [ONE, ZERO],
            (Basis::Z, _) => [ZERO, ONE],
            (Basis::X, 0) => [h, h],
            (Basis::X, _) => [h, -h],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Channel,
    Probe,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Channel => f.write_str("channel"),
            Role::Probe => f.write_str("probe"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    /// Index of the basis vector observed; 0 is `|0⟩` or `|+⟩`.
    pub bit: u8,
    pub basis: Basis,
    pub qubit: Role,
}

/// Square complex matrix checked for unitarity on construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unitary {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Unitary {
    /// Builds a unitary from row-major entries. Only 2×2 and 4×4 are accepted.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self, QuantumError> {
        if dim != 2 && dim != 4 {
            return Err(QuantumError::DimensionMismatch { expected: 4, got: dim });
        }
        if entries.len() != dim * dim {
            return Err(QuantumError::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let mut deviation: f64 = 0.0;
        for r in 0..dim {
            for c in 0..dim {
                let mut acc = ZERO;
                for k in 0..dim {
                    acc += entries[r * dim + k] * entries[c * dim + k].conj();
                }
                let target = if r == c { ONE } else { ZERO };
                deviation = deviation.max((acc - target).norm());
            }
        }
        if !deviation.is_finite() || deviation > UNITARY_TOLERANCE {
            return Err(QuantumError::NonUnitary { deviation });
        }
        Ok(Unitary { dim, entries })
    }

    /// Builds a unitary from interleaved `(re, im)` pairs in row-major order.
    pub fn from_real_pairs(dim: usize, values: &[f64]) -> Result<Self, QuantumError> {
        if values.len() != 2 * dim * dim {
            return Err(QuantumError::DimensionMismatch {
                expected: 2 * dim * dim,
                got: values.len(),
            });
        }
        let entries = values.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
        Unitary::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ONE;
        }
        Unitary { dim, entries }
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Unitary {
            dim: 2,
            entries: vec![h, h, h, -h],
        }
    }

    /// CNOT with the first target as control.
    pub fn cnot() -> Self {
        let mut entries = vec![ZERO; 16];
        entries[0] = ONE;
        entries[5] = ONE;
        entries[11] = ONE;
        entries[14] = ONE;
        Unitary { dim: 4, entries }
    }

    /// Controlled rotation `|0⟩|0⟩ → |0⟩|0⟩`, `|1⟩|0⟩ → |1⟩(cos θ|0⟩ + sin θ|1⟩)`,
    /// completed to a unitary as a controlled real rotation by `θ` on the target.
    pub fn controlled_rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let mut entries = vec![ZERO; 16];
        entries[0] = ONE;
        entries[5] = ONE;
        entries[2 * 4 + 2] = Complex64::new(c, 0.0);
        entries[2 * 4 + 3] = Complex64::new(-s, 0.0);
        entries[3 * 4 + 2] = Complex64::new(s, 0.0);
        entries[3 * 4 + 3] = Complex64::new(c, 0.0);
        Unitary { dim: 4, entries }
    }
}

/// Pure state of the channel qubit and at most one probe.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    amplitudes: [Complex64; 4],
    has_probe: bool,
}

impl JointState {
    /// Wraps raw amplitudes (2 for the channel alone, 4 with a probe).
    pub fn from_amplitudes(amplitudes: &[Complex64]) -> Result<Self, QuantumError> {
        let has_probe = match amplitudes.len() {
            2 => false,
            4 => true,
            n => return Err(QuantumError::InvalidAmplitudeCount(n)),
        };
        let mut buf = [ZERO; 4];
        buf[..amplitudes.len()].copy_from_slice(amplitudes);
        let state = JointState {
            amplitudes: buf,
            has_probe,
        };
        state.check_normalized()?;
        Ok(state)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes[..self.dim()]
    }

    pub fn qubit_roles(&self) -> &'static [Role] {
        if self.has_probe {
            &[Role::Channel, Role::Probe]
        } else {
            &[Role::Channel]
        }
    }

    pub fn has_probe(&self) -> bool {
        self.has_probe
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes().iter().map(|a| a.norm_sqr()).sum()
    }

    fn dim(&self) -> usize {
        if self.has_probe {
            4
        } else {
            2
        }
    }

    fn qubit_count(&self) -> usize {
        if self.has_probe {
            2
        } else {
            1
        }
    }

    fn position(&self, role: Role) -> Result<usize, QuantumError> {
        match role {
            Role::Channel => Ok(0),
            Role::Probe if self.has_probe => Ok(1),
            Role::Probe => Err(QuantumError::UnknownRole(role)),
        }
    }

    /// Bit mask selecting `role` within a basis index.
    fn mask(&self, role: Role) -> Result<usize, QuantumError> {
        let pos = self.position(role)?;
        Ok(1 << (self.qubit_count() - 1 - pos))
    }

    fn check_normalized(&self) -> Result<(), QuantumError> {
        let norm_sq = self.norm_sqr();
        if (norm_sq - 1.0).abs() > NORM_TOLERANCE || !norm_sq.is_finite() {
            return Err(QuantumError::NotNormalized { norm_sq });
        }
        Ok(())
    }

    /// Pairs of basis indices `(i0, i1)` differing only in the `mask` bit.
    fn pairs(&self, mask: usize) -> impl Iterator<Item = (usize, usize)> {
        (0..self.dim())
            .filter(move |i| i & mask == 0)
            .map(move |i| (i, i | mask))
    }
}

/// Returns the single-qubit state for `label`.
pub fn prepare(label: StateLabel) -> JointState {
    let [a0, a1] = label.amplitudes();
    JointState {
        amplitudes: [a0, a1, ZERO, ZERO],
        has_probe: false,
    }
}

/// Born-rule marginal `(p0, p1)` for measuring `target` in `basis`.
pub fn born_probabilities(state: &JointState, target: Role, basis: Basis) -> Result<(f64, f64), QuantumError> {
    let mask = state.mask(target)?;
    let a = &state.amplitudes;
    let (mut p0, mut p1) = (0.0, 0.0);
    for (i0, i1) in state.pairs(mask) {
        match basis {
            Basis::Z => {
                p0 += a[i0].norm_sqr();
                p1 += a[i1].norm_sqr();
            }
            Basis::X => {
                p0 += ((a[i0] + a[i1]) * FRAC_1_SQRT_2).norm_sqr();
                p1 += ((a[i0] - a[i1]) * FRAC_1_SQRT_2).norm_sqr();
            }
        }
    }
    Ok((p0, p1))
}

/// Projective measurement of `target` in `basis`; returns the outcome and the
/// renormalized post-measurement state.
pub fn measure(
    state: &JointState,
    target: Role,
    basis: Basis,
    rng: &mut dyn RngCore,
) -> Result<(Outcome, JointState), QuantumError> {
    state.check_normalized()?;
    let (p0, p1) = born_probabilities(state, target, basis)?;
    let bit = if p0 < NEGLIGIBLE_PROBABILITY {
        1
    } else if p1 < NEGLIGIBLE_PROBABILITY || rng.random::<f64>() * (p0 + p1) < p0 {
        0
    } else {
        1
    };
    let p = if bit == 0 { p0 } else { p1 };
    let scale = 1.0 / p.sqrt();

    let mask = state.mask(target)?;
    let mut out = state.clone();
    let a = &state.amplitudes;
    for (i0, i1) in state.pairs(mask) {
        match basis {
            Basis::Z => {
                if bit == 0 {
                    out.amplitudes[i0] = a[i0] * scale;
                    out.amplitudes[i1] = ZERO;
                } else {
                    out.amplitudes[i0] = ZERO;
                    out.amplitudes[i1] = a[i1] * scale;
                }
            }
            Basis::X => {
                // Component along |±⟩ is (a0 ± a1)/√2, re-expanded as (|0⟩ ± |1⟩)/√2.
                let sign = if bit == 0 { 1.0 } else { -1.0 };
                let coeff = (a[i0] + a[i1] * sign) * 0.5 * scale;
                out.amplitudes[i0] = coeff;
                out.amplitudes[i1] = coeff * sign;
            }
        }
    }
    let outcome = Outcome {
        bit,
        basis,
        qubit: target,
    };
    Ok((outcome, out))
}

/// Applies `u` to `targets` (first target is the most significant index of `u`).
pub fn apply_unitary(state: &JointState, u: &Unitary, targets: &[Role]) -> Result<JointState, QuantumError> {
    let expected = 1usize << targets.len();
    if targets.is_empty() || u.dim() != expected {
        return Err(QuantumError::DimensionMismatch { expected, got: u.dim() });
    }
    let masks = targets.iter().map(|&r| state.mask(r)).collect::<Result<Vec<_>, _>>()?;
    if masks.len() == 2 && masks[0] == masks[1] {
        return Err(QuantumError::RepeatedTarget(targets[0]));
    }
    let target_mask: usize = masks.iter().sum();
    let local = |i: usize| {
        masks
            .iter()
            .fold(0usize, |acc, &m| (acc << 1) | usize::from(i & m != 0))
    };

    let dim = state.dim();
    let a = &state.amplitudes;
    let mut out = state.clone();
    for i in 0..dim {
        let li = local(i);
        let mut acc = ZERO;
        for j in (0..dim).filter(|j| j & !target_mask == i & !target_mask) {
            acc += u.entry(li, local(j)) * a[j];
        }
        out.amplitudes[i] = acc;
    }
    Ok(out)
}

/// Appends a probe prepared in `probe_label` as the second tensor factor.
pub fn attach_probe(state: &JointState, probe_label: StateLabel) -> Result<JointState, QuantumError> {
    if state.has_probe {
        return Err(QuantumError::ProbeAlreadyAttached);
    }
    let [b0, b1] = probe_label.amplitudes();
    let [c0, c1] = [state.amplitudes[0], state.amplitudes[1]];
    Ok(JointState {
        amplitudes: [c0 * b0, c0 * b1, c1 * b0, c1 * b1],
        has_probe: true,
    })
}
