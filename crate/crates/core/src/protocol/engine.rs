use rand::seq::index;
use rand::{Rng, RngCore};

use super::checks::{abort_decision, classify_round, estimate_error_rate, AbortDecision};
use super::sampling::sample_choice_string;
use super::{
    Announcement, BobAction, Category, ErrorRates, ProtocolConfig, ProtocolError, PublicTranscript, RoundRecord,
    RoundRole, RunResult,
};
use crate::adversary::{eve_detection_and_gain, AttackStrategy};
use crate::quantum::{measure, prepare, Basis, JointState, Role, StateLabel};

/// How the SIFT and CTRL rounds are split into INFO, TEST and CTRL checks.
#[derive(Debug, Clone, Copy)]
pub(super) enum Allocation {
    /// TEST is `round(ξ·|Z-SIFT|)`; X-SIFT is discarded; every CTRL round is checked.
    Fraction { xi: f64 },
    /// TEST is τ of all SIFT rounds, INFO the first κ of the rest, λ CTRL rounds checked.
    Quotas { kappa: usize, tau: usize, lambda: usize },
}

/// Protocol-specific choices layered over the common round loop.
#[derive(Debug, Clone, Copy)]
pub(super) struct RoundPlan {
    pub alice_z_probability: f64,
    /// Alice sends |+⟩ every round.
    pub all_plus: bool,
    pub bob_sift_probability: f64,
    /// Alice measures SIFT returns in Z and keys on that outcome.
    pub deferred_sift: bool,
    /// Alice publishes her basis string alongside Bob's action string.
    pub publish_bases: bool,
    pub allocation: Allocation,
}

pub(super) fn execute(
    plan: &RoundPlan,
    config: &ProtocolConfig,
    attack: &mut dyn AttackStrategy,
    rng: &mut dyn RngCore,
) -> Result<RunResult, ProtocolError> {
    let n = config.n;

    // Classical strings: a (0 = Z basis), Alice's values, b (0 = SIFT).
    let a = if plan.all_plus {
        vec![1u8; n]
    } else {
        sample_choice_string(n, plan.alice_z_probability, config.exact_counts, rng)
    };
    let values: Vec<u8> = if plan.all_plus {
        vec![0; n]
    } else {
        (0..n).map(|_| u8::from(rng.random::<bool>())).collect()
    };
    let b = sample_choice_string(n, plan.bob_sift_probability, config.exact_counts, rng);

    let bases: Vec<Basis> = a
        .iter()
        .map(|&bit| if bit == 0 { Basis::Z } else { Basis::X })
        .collect();
    let actions: Vec<BobAction> = b
        .iter()
        .map(|&bit| if bit == 0 { BobAction::Sift } else { BobAction::Ctrl })
        .collect();

    // Qubits travel one at a time; Alice stores each return until b is public.
    let mut register: Vec<JointState> = Vec::with_capacity(n);
    let mut bob_outcomes: Vec<Option<u8>> = vec![None; n];
    for i in 0..n {
        let mut state = prepare(StateLabel::new(bases[i], values[i]));
        state = attack.on_forward(i, state, rng)?;
        if actions[i] == BobAction::Sift {
            let (outcome, collapsed) = measure(&state, Role::Channel, Basis::Z, rng)?;
            bob_outcomes[i] = Some(outcome.bit);
            state = collapsed;
        }
        state = attack.on_backward(i, state, rng)?;
        register.push(state);
    }

    let mut transcript = PublicTranscript::default();
    transcript.push(Announcement::BobActions(actions.clone()));
    if plan.publish_bases {
        transcript.push(Announcement::AliceBases(bases.clone()));
    }

    // Alice's deferred measurements, then Eve's probe readout in Z.
    let mut returns: Vec<Option<u8>> = vec![None; n];
    let mut probe_outcomes: Vec<Option<u8>> = vec![None; n];
    for (i, stored) in register.into_iter().enumerate() {
        let mut state = stored;
        let basis = match actions[i] {
            BobAction::Ctrl => Some(bases[i]),
            BobAction::Sift if plan.deferred_sift => Some(Basis::Z),
            BobAction::Sift => None,
        };
        if let Some(basis) = basis {
            let (outcome, collapsed) = measure(&state, Role::Channel, basis, rng)?;
            returns[i] = Some(outcome.bit);
            state = collapsed;
        }
        if state.has_probe() {
            let (outcome, _) = measure(&state, Role::Probe, Basis::Z, rng)?;
            probe_outcomes[i] = Some(outcome.bit);
        }
    }

    let mut rounds: Vec<RoundRecord> = (0..n)
        .map(|i| {
            let category = classify_round(bases[i], actions[i]);
            RoundRecord {
                index: i,
                alice_basis: bases[i],
                alice_bit: values[i],
                bob_action: actions[i],
                bob_outcome: bob_outcomes[i],
                alice_return_outcome: returns[i],
                category,
                role: RoundRole::Unused,
            }
        })
        .collect();

    let sift_candidates: Vec<usize> = rounds
        .iter()
        .filter(|r| match plan.allocation {
            Allocation::Fraction { .. } => r.category == Category::ZSift,
            Allocation::Quotas { .. } => r.category.is_sift(),
        })
        .map(|r| r.index)
        .collect();
    let ctrl_rounds: Vec<usize> = rounds
        .iter()
        .filter(|r| r.bob_action == BobAction::Ctrl)
        .map(|r| r.index)
        .collect();

    let (ctrl_checked, shortfall) = match plan.allocation {
        Allocation::Fraction { .. } => (ctrl_rounds.len(), false),
        Allocation::Quotas { kappa, tau, lambda } => (
            lambda.min(ctrl_rounds.len()),
            sift_candidates.len() < kappa + tau || ctrl_rounds.len() < lambda,
        ),
    };
    for &i in &ctrl_rounds[..ctrl_checked] {
        rounds[i].role = RoundRole::CtrlCheck;
    }
    if let Allocation::Fraction { .. } = plan.allocation {
        for r in rounds.iter_mut().filter(|r| r.category == Category::XSift) {
            r.role = RoundRole::Discard;
        }
    }

    let ctrl_pairs = |basis: Basis| {
        rounds
            .iter()
            .filter(move |r| r.role == RoundRole::CtrlCheck && r.alice_basis == basis)
            .map(|r| (r.alice_bit, r.alice_return_outcome.expect("CTRL return measured")))
    };
    let z_ctrl = estimate_error_rate(ctrl_pairs(Basis::Z));
    let x_ctrl = estimate_error_rate(ctrl_pairs(Basis::X));

    let test_count = match plan.allocation {
        Allocation::Fraction { xi } => {
            ((xi * sift_candidates.len() as f64).round() as usize).min(sift_candidates.len())
        }
        Allocation::Quotas { tau, .. } => tau.min(sift_candidates.len()),
    };
    let mut test_indices: Vec<usize> = index::sample(rng, sift_candidates.len(), test_count)
        .into_iter()
        .map(|k| sift_candidates[k])
        .collect();
    test_indices.sort_unstable();
    for &i in &test_indices {
        rounds[i].role = RoundRole::Test;
    }

    // Alice's key bit: her prepared value, or her deferred Z outcome when she measured SIFT returns.
    let alice_key_bit = |r: &RoundRecord| {
        if plan.deferred_sift {
            r.alice_return_outcome.expect("SIFT return measured")
        } else {
            r.alice_bit
        }
    };
    let bob_key_bit = |r: &RoundRecord| r.bob_outcome.expect("SIFT outcome recorded");

    let test = estimate_error_rate(
        test_indices
            .iter()
            .map(|&i| (alice_key_bit(&rounds[i]), bob_key_bit(&rounds[i]))),
    );

    let info_quota = match plan.allocation {
        Allocation::Fraction { .. } => usize::MAX,
        Allocation::Quotas { kappa, .. } => kappa,
    };
    let info_indices: Vec<usize> = sift_candidates
        .iter()
        .copied()
        .filter(|&i| rounds[i].role != RoundRole::Test)
        .take(info_quota)
        .collect();
    for &i in &info_indices {
        rounds[i].role = RoundRole::Info;
    }

    let error_rates = ErrorRates { z_ctrl, x_ctrl, test };
    let decision = abort_decision(&error_rates, config.p_t, shortfall);
    let abort_reason = match decision {
        AbortDecision::Continue => None,
        AbortDecision::Abort(reason) => Some(reason),
    };
    match abort_reason {
        Some(reason @ (super::AbortReason::Shortfall | super::AbortReason::CtrlError)) => {
            transcript.push(Announcement::Abort(reason));
        }
        other => {
            transcript.push(Announcement::TestIndices(test_indices.clone()));
            transcript.push(Announcement::TestValues(
                test_indices.iter().map(|&i| (i, bob_key_bit(&rounds[i]))).collect(),
            ));
            if let Some(reason) = other {
                transcript.push(Announcement::Abort(reason));
            }
        }
    }

    let alice_sifted = info_indices.iter().map(|&i| alice_key_bit(&rounds[i])).collect();
    let bob_sifted = info_indices.iter().map(|&i| bob_key_bit(&rounds[i])).collect();

    let mut eve_guesses = attack.finalize(&transcript, &probe_outcomes);
    eve_guesses.resize(n, None);

    let mut result = RunResult {
        config: config.clone(),
        attack_name: attack.name().to_string(),
        rounds,
        aborted: abort_reason.is_some(),
        abort_reason,
        error_rates,
        alice_sifted,
        bob_sifted,
        info_indices,
        test_indices,
        transcript,
        eve_guesses,
        eve_report: None,
        final_key: None,
    };
    result.eve_report = Some(eve_detection_and_gain(&result));
    Ok(result)
}
