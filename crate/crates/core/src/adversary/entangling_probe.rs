use std::f64::consts::FRAC_PI_2;

use rand::RngCore;

use super::{guess_sift_rounds, AttackError, AttackStrategy};
use crate::protocol::PublicTranscript;
use crate::quantum::{apply_unitary, attach_probe, JointState, QuantumError, Role, StateLabel, Unitary};

/// Couples a fresh |0⟩ probe to the forward-leg qubit with the controlled
/// rotation `|1⟩|0⟩ → |1⟩(cos θ|0⟩ + sin θ|1⟩)`, then guesses each SIFT bit as
/// the probe's Z readout. θ = π/2 is a CNOT copy of the Z value.
#[derive(Debug, Clone)]
pub struct EntanglingProbe {
    theta: f64,
    coupling: Unitary,
}

pub fn entangling_probe(theta: f64) -> Result<EntanglingProbe, AttackError> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(AttackError::ThetaOutOfRange(theta));
    }
    Ok(EntanglingProbe {
        theta,
        coupling: Unitary::controlled_rotation(theta),
    })
}

impl EntanglingProbe {
    pub fn theta(&self) -> f64 {
        self.theta
    }
}

impl AttackStrategy for EntanglingProbe {
    fn name(&self) -> &str {
        "entangling_probe"
    }

    fn on_forward(
        &mut self,
        _round: usize,
        state: JointState,
        _rng: &mut dyn RngCore,
    ) -> Result<JointState, QuantumError> {
        let joined = attach_probe(&state, StateLabel::ZERO)?;
        apply_unitary(&joined, &self.coupling, &[Role::Channel, Role::Probe])
    }

    fn on_backward(
        &mut self,
        _round: usize,
        state: JointState,
        _rng: &mut dyn RngCore,
    ) -> Result<JointState, QuantumError> {
        Ok(state)
    }

    fn finalize(&mut self, transcript: &PublicTranscript, probe_outcomes: &[Option<u8>]) -> Vec<Option<u8>> {
        guess_sift_rounds(transcript, probe_outcomes.len(), |i| probe_outcomes[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{born_probabilities, measure, prepare, Basis};
    use crate::seed::rng_from_seed;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    #[test]
    fn zero_theta_is_identity_on_channel() {
        let mut rng = rng_from_seed(0);
        let mut eve = entangling_probe(0.0).unwrap();
        for label in [StateLabel::ZERO, StateLabel::ONE, StateLabel::PLUS, StateLabel::MINUS] {
            let out = eve.on_forward(0, prepare(label), &mut rng).unwrap();
            for basis in [Basis::Z, Basis::X] {
                let a = born_probabilities(&prepare(label), Role::Channel, basis).unwrap();
                let b = born_probabilities(&out, Role::Channel, basis).unwrap();
                assert!((a.0 - b.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn full_strength_probe_on_plus() {
        // |+⟩|0⟩ → (|00⟩+|11⟩)/√2; the channel's X outcome is then uniform.
        let mut rng = rng_from_seed(0);
        let mut eve = entangling_probe(FRAC_PI_2).unwrap();
        let out = eve.on_forward(0, prepare(StateLabel::PLUS), &mut rng).unwrap();
        let amps = out.amplitudes();
        assert!((amps[0].re - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(amps[1].norm() < 1e-12 && amps[2].norm() < 1e-12);
        assert!((amps[3].re - FRAC_1_SQRT_2).abs() < 1e-12);
        let (_, p1) = born_probabilities(&out, Role::Channel, Basis::X).unwrap();
        assert!((p1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn full_strength_probe_copies_z_value() {
        let mut rng = rng_from_seed(1);
        let mut eve = entangling_probe(FRAC_PI_2).unwrap();
        for _ in 0..32 {
            let s = eve.on_forward(0, prepare(StateLabel::PLUS), &mut rng).unwrap();
            let (bob, s) = measure(&s, Role::Channel, Basis::Z, &mut rng).unwrap();
            let (probe, _) = measure(&s, Role::Probe, Basis::Z, &mut rng).unwrap();
            assert_eq!(bob.bit, probe.bit);
        }
    }

    #[test]
    fn theta_bounds() {
        assert!(entangling_probe(-0.01).is_err());
        assert!(entangling_probe(FRAC_PI_2 + 1e-9).is_err());
        assert_eq!(entangling_probe(FRAC_PI_4).unwrap().theta(), FRAC_PI_4);
    }
}
