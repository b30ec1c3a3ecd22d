//! Round-level execution of the asymmetric SQKD protocols and the symmetric
//! baseline, from Alice's preparation through the abort decision.

mod checks;
mod config;
mod engine;
mod registry;
mod sampling;

use serde::{Deserialize, Serialize};

use crate::adversary::{AttackError, EveReport};
use crate::quantum::{Basis, QuantumError};

pub use checks::{abort_decision, classify_round, estimate_error_rate, AbortDecision, ErrorEstimate};
pub use config::{ConfigError, ProtocolConfig, ProtocolKind, DEFAULT_THRESHOLD};
pub use registry::{
    run_baseline, run_protocol1, run_protocol2, run_protocol3, simulate, AllPlus, AsymmetricFourState, Protocol,
    ProtocolRegistry, SiftReuse, SymmetricBaseline,
};
pub use sampling::sample_choice_string;

#[derive(Debug, thiserror::Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error("protocol {0} is not registered")]
    UnknownProtocol(String),
    #[error("protocol {expected} cannot run a {got} configuration")]
    WrongProtocol { expected: ProtocolKind, got: ProtocolKind },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BobAction {
    /// Measure in Z and resend the observed state.
    Sift,
    /// Reflect without touching the qubit.
    Ctrl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    ZSift,
    XSift,
    ZCtrl,
    XCtrl,
}

impl Category {
    pub const ALL: [Category; 4] = [Category::ZSift, Category::XSift, Category::ZCtrl, Category::XCtrl];

    pub fn is_sift(self) -> bool {
        matches!(self, Category::ZSift | Category::XSift)
    }

    pub fn prepared_basis(self) -> Basis {
        match self {
            Category::ZSift | Category::ZCtrl => Basis::Z,
            Category::XSift | Category::XCtrl => Basis::X,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RoundRole {
    Info,
    Test,
    CtrlCheck,
    /// X-SIFT rounds of the four-state protocol with immediate sifting.
    Discard,
    /// Valid rounds beyond the κ/τ/λ quotas; they exist because of the δ slack.
    Unused,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub index: usize,
    pub alice_basis: Basis,
    pub alice_bit: u8,
    pub bob_action: BobAction,
    pub bob_outcome: Option<u8>,
    pub alice_return_outcome: Option<u8>,
    pub category: Category,
    pub role: RoundRole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AbortReason {
    CtrlError,
    TestError,
    Shortfall,
}

/// Classical messages on the authenticated public channel, in the order sent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Announcement {
    BobActions(Vec<BobAction>),
    AliceBases(Vec<Basis>),
    TestIndices(Vec<usize>),
    /// Bob's recorded outcome for each TEST index.
    TestValues(Vec<(usize, u8)>),
    Abort(AbortReason),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PublicTranscript {
    announcements: Vec<Announcement>,
}

impl PublicTranscript {
    pub fn push(&mut self, a: Announcement) {
        self.announcements.push(a);
    }

    pub fn announcements(&self) -> &[Announcement] {
        &self.announcements
    }

    pub fn bob_actions(&self) -> Option<&[BobAction]> {
        self.announcements.iter().find_map(|a| match a {
            Announcement::BobActions(b) => Some(b.as_slice()),
            _ => None,
        })
    }

    pub fn alice_bases(&self) -> Option<&[Basis]> {
        self.announcements.iter().find_map(|a| match a {
            Announcement::AliceBases(b) => Some(b.as_slice()),
            _ => None,
        })
    }

    pub fn test_indices(&self) -> Option<&[usize]> {
        self.announcements.iter().find_map(|a| match a {
            Announcement::TestIndices(t) => Some(t.as_slice()),
            _ => None,
        })
    }

    pub fn abort(&self) -> Option<AbortReason> {
        self.announcements.iter().find_map(|a| match a {
            Announcement::Abort(r) => Some(*r),
            _ => None,
        })
    }

    /// Indices of rounds Bob announced as SIFT.
    pub fn sift_rounds(&self) -> Vec<usize> {
        self.bob_actions()
            .map(|b| {
                b.iter()
                    .enumerate()
                    .filter(|(_, a)| **a == BobAction::Sift)
                    .map(|(i, _)| i)
                    .collect()
            })
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorRates {
    pub z_ctrl: ErrorEstimate,
    pub x_ctrl: ErrorEstimate,
    pub test: ErrorEstimate,
}

impl ErrorRates {
    /// Pooled error rate over both CTRL categories.
    pub fn ctrl(&self) -> ErrorEstimate {
        ErrorEstimate {
            errors: self.z_ctrl.errors + self.x_ctrl.errors,
            samples: self.z_ctrl.samples + self.x_ctrl.samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub config: ProtocolConfig,
    pub attack_name: String,
    pub rounds: Vec<RoundRecord>,
    pub aborted: bool,
    pub abort_reason: Option<AbortReason>,
    pub error_rates: ErrorRates,
    /// Alice's INFO bits in index order.
    pub alice_sifted: Vec<u8>,
    /// Bob's INFO bits in index order.
    pub bob_sifted: Vec<u8>,
    pub info_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub transcript: PublicTranscript,
    /// Eve's guess for each round, if she made one.
    pub eve_guesses: Vec<Option<u8>>,
    pub eve_report: Option<EveReport>,
    pub final_key: Option<Vec<u8>>,
}

impl RunResult {
    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    pub fn category_count(&self, category: Category) -> usize {
        self.rounds.iter().filter(|r| r.category == category).count()
    }

    pub fn role_count(&self, role: RoundRole) -> usize {
        self.rounds.iter().filter(|r| r.role == role).count()
    }

    /// `|INFO| / N`, or zero when the run aborted and produced no key.
    pub fn efficiency(&self) -> f64 {
        if self.aborted || self.rounds.is_empty() {
            0.0
        } else {
            self.info_indices.len() as f64 / self.rounds.len() as f64
        }
    }
}
