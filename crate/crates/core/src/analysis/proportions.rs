use serde::{Deserialize, Serialize};

use crate::protocol::{Category, RoundRole, RunResult};

/// Fractions of all transmitted qubits, by category and by final use.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ProportionBreakdown {
    pub z_sift: f64,
    pub x_sift: f64,
    pub z_ctrl: f64,
    pub x_ctrl: f64,
    pub info: f64,
    pub test: f64,
    pub ctrl: f64,
}

impl ProportionBreakdown {
    pub fn category_sum(&self) -> f64 {
        self.z_sift + self.x_sift + self.z_ctrl + self.x_ctrl
    }

    pub fn sift(&self) -> f64 {
        self.z_sift + self.x_sift
    }

    pub fn category(&self, category: Category) -> f64 {
        match category {
            Category::ZSift => self.z_sift,
            Category::XSift => self.x_sift,
            Category::ZCtrl => self.z_ctrl,
            Category::XCtrl => self.x_ctrl,
        }
    }

    /// Relabels every round as X-prepared, as happens when Alice only sends |+⟩.
    pub fn all_x_prepared(self) -> Self {
        ProportionBreakdown {
            z_sift: 0.0,
            x_sift: self.z_sift + self.x_sift,
            z_ctrl: 0.0,
            x_ctrl: self.z_ctrl + self.x_ctrl,
            ..self
        }
    }
}

/// Which share of the Z-SIFT rounds ξ names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum XiConvention {
    /// ξ is the TEST share of the SIFT bits; INFO gets `1 − ξ`.
    #[default]
    Step6,
    /// ξ is the INFO share, as printed in the proportions table.
    Table1,
}

pub fn theoretical_proportions_p1(gamma1: f64, gamma2: f64, xi: f64, convention: XiConvention) -> ProportionBreakdown {
    let z_sift = gamma1 * gamma2;
    let (info, test) = match convention {
        XiConvention::Step6 => ((1.0 - xi) * z_sift, xi * z_sift),
        XiConvention::Table1 => (xi * z_sift, (1.0 - xi) * z_sift),
    };
    let z_ctrl = gamma1 * (1.0 - gamma2);
    let x_ctrl = (1.0 - gamma1) * (1.0 - gamma2);
    ProportionBreakdown {
        z_sift,
        x_sift: (1.0 - gamma1) * gamma2,
        z_ctrl,
        x_ctrl,
        info,
        test,
        ctrl: z_ctrl + x_ctrl,
    }
}

/// Quota-sized protocols. Categories assume Alice's basis is uniform; use
/// [`ProportionBreakdown::all_x_prepared`] for the |+⟩-only variant.
pub fn theoretical_proportions_p23(kappa: usize, tau: usize, lambda: usize) -> ProportionBreakdown {
    let total = (kappa + tau + lambda) as f64;
    let ctrl = lambda as f64 / total;
    let test = tau as f64 / total;
    let info = kappa as f64 / total;
    let sift = test + info;
    ProportionBreakdown {
        z_sift: sift / 2.0,
        x_sift: sift / 2.0,
        z_ctrl: ctrl / 2.0,
        x_ctrl: ctrl / 2.0,
        info,
        test,
        ctrl,
    }
}

/// Observed fractions, each normalized by the run's round count.
pub fn empirical_proportions(run: &RunResult) -> ProportionBreakdown {
    let n = run.round_count().max(1) as f64;
    let cat = |c| run.category_count(c) as f64 / n;
    let role = |r| run.role_count(r) as f64 / n;
    ProportionBreakdown {
        z_sift: cat(Category::ZSift),
        x_sift: cat(Category::XSift),
        z_ctrl: cat(Category::ZCtrl),
        x_ctrl: cat(Category::XCtrl),
        info: role(RoundRole::Info),
        test: role(RoundRole::Test),
        ctrl: role(RoundRole::CtrlCheck),
    }
}

/// Binomial standard deviation of a fraction `p` estimated from `n` trials.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn symmetric_case() {
        let p = theoretical_proportions_p1(0.5, 0.5, 0.3, XiConvention::Step6);
        assert_abs_diff_eq!(p.z_sift, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn table_one_values() {
        let p = theoretical_proportions_p1(0.9, 0.9, 0.1, XiConvention::Step6);
        assert_abs_diff_eq!(p.info, 0.729, epsilon = 1e-12);
        assert_abs_diff_eq!(p.test, 0.081, epsilon = 1e-12);
        assert_abs_diff_eq!(p.x_sift, 0.09, epsilon = 1e-12);
        assert_abs_diff_eq!(p.z_ctrl, 0.09, epsilon = 1e-12);
        assert_abs_diff_eq!(p.x_ctrl, 0.01, epsilon = 1e-12);
        let t = theoretical_proportions_p1(0.9, 0.9, 0.1, XiConvention::Table1);
        assert_abs_diff_eq!(t.info, 0.081, epsilon = 1e-12);
        assert_abs_diff_eq!(t.test, 0.729, epsilon = 1e-12);
    }

    #[test]
    fn limit_towards_full_efficiency() {
        let p = theoretical_proportions_p1(0.999_999, 0.999_999, 1e-9, XiConvention::Step6);
        assert!(p.info > 0.9999);
    }

    #[test]
    fn quota_ratios() {
        let p = theoretical_proportions_p23(25, 25, 50);
        assert_abs_diff_eq!(p.ctrl, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.info, 0.25, epsilon = 1e-15);
        let p = theoretical_proportions_p23(98, 1, 1);
        assert_abs_diff_eq!(p.info, 0.98, epsilon = 1e-15);
        assert_abs_diff_eq!(p.info + p.test + p.ctrl, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.all_x_prepared().category_sum(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn monotone_efficiency_on_grid() {
        let grid = |lo: f64, hi: f64| (0..5).map(move |k| lo + (hi - lo) * (k as f64 + 0.5) / 5.0);
        for g1 in grid(0.5, 1.0) {
            for g2 in grid(0.5, 1.0) {
                for xi in grid(0.0, 0.5) {
                    let info = |a, b, c| theoretical_proportions_p1(a, b, c, XiConvention::Step6).info;
                    let base = info(g1, g2, xi);
                    assert!(info(g1 + 0.05, g2, xi) > base);
                    assert!(info(g1, g2 + 0.05, xi) > base);
                    assert!(info(g1, g2, xi + 0.05) < base);
                    let p = theoretical_proportions_p1(g1, g2, xi, XiConvention::Step6);
                    assert_abs_diff_eq!(p.category_sum(), 1.0, epsilon = 1e-12);
                    assert_abs_diff_eq!(p.info + p.test, p.z_sift, epsilon = 1e-12);
                }
            }
        }
    }
}
