use serde::{Deserialize, Serialize};

use super::{AbortReason, BobAction, Category, ErrorRates};
use crate::quantum::Basis;

pub fn classify_round(alice_basis: Basis, bob_action: BobAction) -> Category {
    match (alice_basis, bob_action) {
        (Basis::Z, BobAction::Sift) => Category::ZSift,
        (Basis::X, BobAction::Sift) => Category::XSift,
        (Basis::Z, BobAction::Ctrl) => Category::ZCtrl,
        (Basis::X, BobAction::Ctrl) => Category::XCtrl,
    }
}

/// Mismatch count over a set of compared bits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub errors: usize,
    pub samples: usize,
}

impl ErrorEstimate {
    /// Error fraction; zero when there is no data (see [`ErrorEstimate::no_data`]).
    pub fn rate(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.errors as f64 / self.samples as f64
        }
    }

    pub fn no_data(&self) -> bool {
        self.samples == 0
    }
}

pub fn estimate_error_rate<I>(pairs: I) -> ErrorEstimate
where
    I: IntoIterator<Item = (u8, u8)>,
{
    pairs
        .into_iter()
        .fold(ErrorEstimate::default(), |mut acc, (expected, observed)| {
            acc.samples += 1;
            acc.errors += usize::from(expected != observed);
            acc
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbortDecision {
    Continue,
    Abort(AbortReason),
}

/// Shortfall is checked first, then each CTRL category, then TEST. Rates equal
/// to `p_t` pass.
pub fn abort_decision(rates: &ErrorRates, p_t: f64, shortfall: bool) -> AbortDecision {
    if shortfall {
        AbortDecision::Abort(AbortReason::Shortfall)
    } else if rates.z_ctrl.rate() > p_t || rates.x_ctrl.rate() > p_t {
        AbortDecision::Abort(AbortReason::CtrlError)
    } else if rates.test.rate() > p_t {
        AbortDecision::Abort(AbortReason::TestError)
    } else {
        AbortDecision::Continue
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn est(errors: usize, samples: usize) -> ErrorEstimate {
        ErrorEstimate { errors, samples }
    }

    #[test]
    fn classification_table() {
        assert_eq!(classify_round(Basis::Z, BobAction::Sift), Category::ZSift);
        assert_eq!(classify_round(Basis::X, BobAction::Sift), Category::XSift);
        assert_eq!(classify_round(Basis::Z, BobAction::Ctrl), Category::ZCtrl);
        assert_eq!(classify_round(Basis::X, BobAction::Ctrl), Category::XCtrl);
    }

    #[test]
    fn error_rate_examples() {
        assert_eq!(estimate_error_rate([(0, 0), (1, 1)]).rate(), 0.0);
        assert_eq!(estimate_error_rate([(0, 1), (1, 1), (0, 0), (1, 0)]).rate(), 0.5);
        let empty = estimate_error_rate(std::iter::empty());
        assert_eq!(empty.rate(), 0.0);
        assert!(empty.no_data());
    }

    #[test]
    fn abort_examples() {
        let clean = ErrorRates::default();
        assert_eq!(abort_decision(&clean, 0.05, false), AbortDecision::Continue);

        let ctrl = ErrorRates {
            z_ctrl: est(51, 1000),
            ..Default::default()
        };
        assert_eq!(
            abort_decision(&ctrl, 0.05, false),
            AbortDecision::Abort(AbortReason::CtrlError)
        );

        let at_threshold = ErrorRates {
            x_ctrl: est(5, 100),
            test: est(1, 20),
            ..Default::default()
        };
        assert_eq!(abort_decision(&at_threshold, 0.05, false), AbortDecision::Continue);

        let both = ErrorRates {
            x_ctrl: est(10, 100),
            test: est(10, 100),
            ..Default::default()
        };
        assert_eq!(
            abort_decision(&both, 0.05, false),
            AbortDecision::Abort(AbortReason::CtrlError)
        );
        assert_eq!(
            abort_decision(&clean, 0.05, true),
            AbortDecision::Abort(AbortReason::Shortfall)
        );
    }
}
