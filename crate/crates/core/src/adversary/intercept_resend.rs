use rand::{Rng, RngCore};

use super::{guess_sift_rounds, AttackStrategy, BasisPolicy, Legs};
use crate::protocol::PublicTranscript;
use crate::quantum::{measure, Basis, JointState, QuantumError, Role};

#[derive(Debug, Clone, Copy, Default)]
struct Record {
    basis: Option<Basis>,
    forward: Option<u8>,
    backward: Option<u8>,
}

/// Measure-and-forward on the configured legs.
///
/// Eve's guess for a SIFT round is her Z outcome on that round, preferring the
/// backward leg (taken after Bob's measurement) over the forward leg.
#[derive(Debug, Clone)]
pub struct InterceptResend {
    policy: BasisPolicy,
    legs: Legs,
    records: Vec<Record>,
}

pub fn intercept_resend(policy: BasisPolicy, legs: Legs) -> InterceptResend {
    InterceptResend {
        policy,
        legs,
        records: Vec::new(),
    }
}

impl InterceptResend {
    fn record(&mut self, round: usize) -> &mut Record {
        if self.records.len() <= round {
            self.records.resize(round + 1, Record::default());
        }
        &mut self.records[round]
    }

    fn basis_for(&mut self, round: usize, rng: &mut dyn RngCore) -> Basis {
        let policy = self.policy;
        let rec = self.record(round);
        *rec.basis.get_or_insert_with(|| match policy {
            BasisPolicy::AlwaysZ => Basis::Z,
            BasisPolicy::AlwaysX => Basis::X,
            BasisPolicy::RandomPerRound => {
                if rng.random::<bool>() {
                    Basis::X
                } else {
                    Basis::Z
                }
            }
        })
    }
}

impl AttackStrategy for InterceptResend {
    fn name(&self) -> &str {
        "intercept_resend"
    }

    fn on_forward(
        &mut self,
        round: usize,
        state: JointState,
        rng: &mut dyn RngCore,
    ) -> Result<JointState, QuantumError> {
        if !self.legs.forward() {
            return Ok(state);
        }
        let basis = self.basis_for(round, rng);
        let (outcome, collapsed) = measure(&state, Role::Channel, basis, rng)?;
        self.record(round).forward = Some(outcome.bit);
        Ok(collapsed)
    }

    fn on_backward(
        &mut self,
        round: usize,
        state: JointState,
        rng: &mut dyn RngCore,
    ) -> Result<JointState, QuantumError> {
        if !self.legs.backward() {
            return Ok(state);
        }
        let basis = self.basis_for(round, rng);
        let (outcome, collapsed) = measure(&state, Role::Channel, basis, rng)?;
        self.record(round).backward = Some(outcome.bit);
        Ok(collapsed)
    }

    fn finalize(&mut self, transcript: &PublicTranscript, probe_outcomes: &[Option<u8>]) -> Vec<Option<u8>> {
        let records = &self.records;
        guess_sift_rounds(transcript, probe_outcomes.len(), |i| {
            let rec = records.get(i)?;
            match rec.basis {
                Some(Basis::Z) => rec.backward.or(rec.forward),
                _ => None,
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{born_probabilities, prepare, StateLabel};
    use crate::seed::rng_from_seed;

    #[test]
    fn z_interception_of_plus_randomizes_x() {
        // |+⟩ → |0⟩ or |1⟩; each has X-outcome 1 with probability 1/2.
        let mut rng = rng_from_seed(5);
        let mut eve = intercept_resend(BasisPolicy::AlwaysZ, Legs::Forward);
        let out = eve.on_forward(0, prepare(StateLabel::PLUS), &mut rng).unwrap();
        let (_, p1) = born_probabilities(&out, Role::Channel, Basis::X).unwrap();
        assert!((p1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn z_interception_of_z_eigenstate_is_harmless() {
        let mut rng = rng_from_seed(6);
        let mut eve = intercept_resend(BasisPolicy::AlwaysZ, Legs::Forward);
        for (i, label) in [StateLabel::ZERO, StateLabel::ONE].into_iter().enumerate() {
            let out = eve.on_forward(i, prepare(label), &mut rng).unwrap();
            assert_eq!(out, prepare(label));
        }
    }

    #[test]
    fn forward_only_leaves_backward_untouched() {
        let mut rng = rng_from_seed(7);
        let mut probe_rng = rng_from_seed(7);
        let mut eve = intercept_resend(BasisPolicy::RandomPerRound, Legs::Forward);
        let s = prepare(StateLabel::MINUS);
        assert_eq!(eve.on_backward(0, s.clone(), &mut rng).unwrap(), s);
        // No randomness consumed either.
        assert_eq!(rng.random::<u64>(), probe_rng.random::<u64>());
    }

    #[test]
    fn random_policy_shares_basis_across_legs() {
        let mut rng = rng_from_seed(8);
        let mut eve = intercept_resend(BasisPolicy::RandomPerRound, Legs::Both);
        for round in 0..200 {
            let s = eve.on_forward(round, prepare(StateLabel::PLUS), &mut rng).unwrap();
            let s2 = eve.on_backward(round, s.clone(), &mut rng).unwrap();
            // Re-measuring in the same basis never changes the collapsed state.
            assert_eq!(s, s2);
        }
    }
}
