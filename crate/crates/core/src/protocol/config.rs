use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Abort threshold used when none is configured.
pub const DEFAULT_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProtocolKind {
    /// Four-state protocol with asymmetric basis and action probabilities.
    P1,
    /// Four-state protocol that keeps X-SIFT rounds via deferred Z measurement.
    P2,
    /// Like P2 but Alice only ever sends |+⟩.
    P3,
    /// P1 machinery with γ₁ = γ₂ = 1/2.
    #[serde(rename = "BASELINE")]
    Baseline,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 4] = [
        ProtocolKind::P1,
        ProtocolKind::P2,
        ProtocolKind::P3,
        ProtocolKind::Baseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::P1 => "P1",
            ProtocolKind::P2 => "P2",
            ProtocolKind::P3 => "P3",
            ProtocolKind::Baseline => "BASELINE",
        }
    }

    /// Whether the protocol is sized by κ, τ, λ, δ rather than N, γ₁, γ₂, ξ.
    pub fn uses_quotas(self) -> bool {
        matches!(self, ProtocolKind::P2 | ProtocolKind::P3)
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "P1" => Ok(ProtocolKind::P1),
            "P2" => Ok(ProtocolKind::P2),
            "P3" => Ok(ProtocolKind::P3),
            "BASELINE" => Ok(ProtocolKind::Baseline),
            _ => Err(format!("unknown protocol {s:?} (expected P1, P2, P3 or BASELINE)")),
        }
    }
}

/// A parameter that is out of range, keyed by its configuration name.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct ConfigError {
    pub key: &'static str,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: &'static str, message: impl Into<String>) -> Self {
        ConfigError {
            key,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub protocol: ProtocolKind,
    /// Number of qubits sent. Derived from the quotas for P2/P3.
    pub n: usize,
    pub gamma1: f64,
    pub gamma2: f64,
    pub xi: f64,
    pub kappa: usize,
    pub tau: usize,
    pub lambda: usize,
    pub delta: f64,
    pub p_t: f64,
    pub seed: u64,
    pub exact_counts: bool,
}

impl ProtocolConfig {
    pub fn protocol1(n: usize, gamma1: f64, gamma2: f64, xi: f64) -> Self {
        ProtocolConfig {
            protocol: ProtocolKind::P1,
            n,
            gamma1,
            gamma2,
            xi,
            kappa: 0,
            tau: 0,
            lambda: 0,
            delta: 0.0,
            p_t: DEFAULT_THRESHOLD,
            seed: 0,
            exact_counts: false,
        }
    }

    pub fn baseline(n: usize, xi: f64) -> Self {
        ProtocolConfig {
            protocol: ProtocolKind::Baseline,
            ..ProtocolConfig::protocol1(n, 0.5, 0.5, xi)
        }
    }

    pub fn protocol2(kappa: usize, tau: usize, lambda: usize, delta: f64) -> Self {
        ProtocolConfig {
            protocol: ProtocolKind::P2,
            n: quota_round_count(kappa, tau, lambda, delta),
            gamma1: 0.5,
            gamma2: 0.0,
            xi: 0.0,
            kappa,
            tau,
            lambda,
            delta,
            p_t: DEFAULT_THRESHOLD,
            seed: 0,
            exact_counts: false,
        }
    }

    pub fn protocol3(kappa: usize, tau: usize, lambda: usize, delta: f64) -> Self {
        ProtocolConfig {
            protocol: ProtocolKind::P3,
            ..ProtocolConfig::protocol2(kappa, tau, lambda, delta)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_threshold(mut self, p_t: f64) -> Self {
        self.p_t = p_t;
        self
    }

    pub fn with_exact_counts(mut self, exact: bool) -> Self {
        self.exact_counts = exact;
        self
    }

    /// Recomputes N from the quotas (P2/P3 only).
    pub fn refresh_round_count(&mut self) {
        if self.protocol.uses_quotas() {
            self.n = quota_round_count(self.kappa, self.tau, self.lambda, self.delta);
        }
    }

    /// Probability that Alice prepares in the Z basis.
    pub fn alice_z_probability(&self) -> f64 {
        match self.protocol {
            ProtocolKind::P1 => self.gamma1,
            ProtocolKind::Baseline | ProtocolKind::P2 => 0.5,
            ProtocolKind::P3 => 0.0,
        }
    }

    /// Probability that Bob chooses SIFT.
    pub fn bob_sift_probability(&self) -> f64 {
        match self.protocol {
            ProtocolKind::P1 => self.gamma2,
            ProtocolKind::Baseline => 0.5,
            ProtocolKind::P2 | ProtocolKind::P3 => {
                let sift = (self.kappa + self.tau) as f64;
                sift / (sift + self.lambda as f64)
            }
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.p_t >= 0.0 && self.p_t < 0.5) {
            return Err(ConfigError::new("p_t", "p_t must satisfy 0 <= p_t < 1/2"));
        }
        match self.protocol {
            ProtocolKind::P1 => {
                if !(self.gamma1 > 0.5 && self.gamma1 < 1.0) {
                    return Err(ConfigError::new("gamma1", "gamma1 must satisfy 1/2 < gamma1 < 1"));
                }
                if !(self.gamma2 > 0.5 && self.gamma2 < 1.0) {
                    return Err(ConfigError::new("gamma2", "gamma2 must satisfy 1/2 < gamma2 < 1"));
                }
                self.validate_sift_test_split()
            }
            ProtocolKind::Baseline => self.validate_sift_test_split(),
            ProtocolKind::P2 | ProtocolKind::P3 => {
                for (key, value) in [("kappa", self.kappa), ("tau", self.tau), ("lambda", self.lambda)] {
                    if value < 1 {
                        return Err(ConfigError::new(key, format!("{key} must be at least 1")));
                    }
                }
                if !(self.delta > 0.0 && self.delta.is_finite()) {
                    return Err(ConfigError::new("delta", "delta must satisfy delta > 0"));
                }
                let expected = quota_round_count(self.kappa, self.tau, self.lambda, self.delta);
                if self.n != expected {
                    return Err(ConfigError::new(
                        "N",
                        format!("N must equal round((kappa+tau+lambda)(1+delta)) = {expected}"),
                    ));
                }
                Ok(())
            }
        }
    }

    fn validate_sift_test_split(&self) -> Result<(), ConfigError> {
        if !(self.xi > 0.0 && self.xi < 0.5) {
            return Err(ConfigError::new("xi", "xi must satisfy 0 < xi < 1/2"));
        }
        if self.n < 1 {
            return Err(ConfigError::new("N", "N must be at least 1"));
        }
        Ok(())
    }
}

/// `round((κ+τ+λ)(1+δ))`.
pub fn quota_round_count(kappa: usize, tau: usize, lambda: usize, delta: f64) -> usize {
    ((kappa + tau + lambda) as f64 * (1.0 + delta)).round() as usize
}
