use rand::RngCore;

use super::{guess_sift_rounds, AttackError, AttackStrategy};
use crate::protocol::PublicTranscript;
use crate::quantum::{apply_unitary, attach_probe, JointState, QuantumError, Role, StateLabel, Unitary};

/// User-supplied 4×4 unitaries on (channel, probe) for either leg. The probe
/// starts in |0⟩ and is shared by both legs; guesses are its Z readout.
#[derive(Debug, Clone)]
pub struct CustomUnitary {
    forward: Option<Unitary>,
    backward: Option<Unitary>,
}

impl CustomUnitary {
    pub fn new(forward: Option<Unitary>, backward: Option<Unitary>) -> Result<Self, AttackError> {
        for u in forward.iter().chain(backward.iter()) {
            if u.dim() != 4 {
                return Err(QuantumError::DimensionMismatch {
                    expected: 4,
                    got: u.dim(),
                }
                .into());
            }
        }
        Ok(CustomUnitary { forward, backward })
    }

    fn apply(u: Option<&Unitary>, state: JointState) -> Result<JointState, QuantumError> {
        let Some(u) = u else { return Ok(state) };
        let joined = if state.has_probe() {
            state
        } else {
            attach_probe(&state, StateLabel::ZERO)?
        };
        apply_unitary(&joined, u, &[Role::Channel, Role::Probe])
    }
}

impl AttackStrategy for CustomUnitary {
    fn name(&self) -> &str {
        "custom_unitary"
    }

    fn on_forward(
        &mut self,
        _round: usize,
        state: JointState,
        _rng: &mut dyn RngCore,
    ) -> Result<JointState, QuantumError> {
        Self::apply(self.forward.as_ref(), state)
    }

    fn on_backward(
        &mut self,
        _round: usize,
        state: JointState,
        _rng: &mut dyn RngCore,
    ) -> Result<JointState, QuantumError> {
        Self::apply(self.backward.as_ref(), state)
    }

    fn finalize(&mut self, transcript: &PublicTranscript, probe_outcomes: &[Option<u8>]) -> Vec<Option<u8>> {
        guess_sift_rounds(transcript, probe_outcomes.len(), |i| probe_outcomes[i])
    }
}
