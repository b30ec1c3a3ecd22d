//! Eavesdropper strategies acting on the Alice→Bob and Bob→Alice legs of each
//! round, plus the bookkeeping that scores them.
//!
//! Strategies implement [`AttackStrategy`] and are built by name through an
//! [`AttackRegistry`]. Each instance is bound to one protocol run.

mod custom_unitary;
mod entangling_probe;
mod intercept_resend;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::protocol::{PublicTranscript, RunResult};
use crate::quantum::{JointState, QuantumError, Unitary};

pub use custom_unitary::CustomUnitary;
pub use entangling_probe::{entangling_probe, EntanglingProbe};
pub use intercept_resend::{intercept_resend, InterceptResend};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AttackError {
    #[error("unknown attack {0:?}")]
    UnknownAttack(String),
    #[error("attack {attack} requires parameter {param}")]
    MissingParameter { attack: &'static str, param: &'static str },
    #[error("theta must satisfy 0 <= theta <= pi/2, got {0}")]
    ThetaOutOfRange(f64),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// Eve's interface to a protocol run.
///
/// The hooks only see the travelling qubit (and Eve's own probe, if she
/// attached one). `finalize` runs after the public discussion and sees only the
/// public transcript plus Z readouts of her probe, one slot per round.
pub trait AttackStrategy: Send {
    fn name(&self) -> &str;

    fn on_forward(
        &mut self,
        round: usize,
        state: JointState,
        rng: &mut dyn RngCore,
    ) -> Result<JointState, QuantumError>;

    fn on_backward(
        &mut self,
        round: usize,
        state: JointState,
        rng: &mut dyn RngCore,
    ) -> Result<JointState, QuantumError>;

    /// Per-round key-bit guesses; `None` where Eve abstains.
    fn finalize(&mut self, transcript: &PublicTranscript, probe_outcomes: &[Option<u8>]) -> Vec<Option<u8>>;
}

/// Identity on both legs, never guesses.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoAttack;

pub fn no_attack() -> NoAttack {
    NoAttack
}

impl AttackStrategy for NoAttack {
    fn name(&self) -> &str {
        "none"
    }

    fn on_forward(&mut self, _: usize, state: JointState, _: &mut dyn RngCore) -> Result<JointState, QuantumError> {
        Ok(state)
    }

    fn on_backward(&mut self, _: usize, state: JointState, _: &mut dyn RngCore) -> Result<JointState, QuantumError> {
        Ok(state)
    }

    fn finalize(&mut self, _: &PublicTranscript, probe_outcomes: &[Option<u8>]) -> Vec<Option<u8>> {
        vec![None; probe_outcomes.len()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisPolicy {
    AlwaysZ,
    AlwaysX,
    /// One uniformly random basis per round, shared by both legs.
    RandomPerRound,
}

impl BasisPolicy {
    pub fn name(self) -> &'static str {
        match self {
            BasisPolicy::AlwaysZ => "always_Z",
            BasisPolicy::AlwaysX => "always_X",
            BasisPolicy::RandomPerRound => "random_per_round",
        }
    }
}

impl FromStr for BasisPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "always_Z" | "always_z" | "Z" => Ok(BasisPolicy::AlwaysZ),
            "always_X" | "always_x" | "X" => Ok(BasisPolicy::AlwaysX),
            "random_per_round" | "random" => Ok(BasisPolicy::RandomPerRound),
            _ => Err(format!(
                "unknown basis policy {s:?} (expected always_Z, always_X or random_per_round)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Legs {
    Forward,
    Backward,
    Both,
}

impl Legs {
    pub fn name(self) -> &'static str {
        match self {
            Legs::Forward => "forward",
            Legs::Backward => "backward",
            Legs::Both => "both",
        }
    }

    pub fn forward(self) -> bool {
        matches!(self, Legs::Forward | Legs::Both)
    }

    pub fn backward(self) -> bool {
        matches!(self, Legs::Backward | Legs::Both)
    }
}

impl FromStr for Legs {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forward" => Ok(Legs::Forward),
            "backward" => Ok(Legs::Backward),
            "both" => Ok(Legs::Both),
            _ => Err(format!("unknown legs {s:?} (expected forward, backward or both)")),
        }
    }
}

/// A named attack plus the parameters needed to build it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackCatalogEntry {
    pub name: String,
    /// Named real parameters, e.g. `theta` in radians.
    pub parameters: BTreeMap<String, f64>,
    pub basis_policy: Option<BasisPolicy>,
    pub legs: Option<Legs>,
    pub unitary_forward: Option<Unitary>,
    pub unitary_backward: Option<Unitary>,
}

impl AttackCatalogEntry {
    pub fn named(name: &str) -> Self {
        AttackCatalogEntry {
            name: name.to_string(),
            parameters: BTreeMap::new(),
            basis_policy: None,
            legs: None,
            unitary_forward: None,
            unitary_backward: None,
        }
    }

    pub fn none() -> Self {
        Self::named("none")
    }

    pub fn intercept_resend(policy: BasisPolicy, legs: Legs) -> Self {
        AttackCatalogEntry {
            basis_policy: Some(policy),
            legs: Some(legs),
            ..Self::named("intercept_resend")
        }
    }

    pub fn entangling_probe(theta: f64) -> Self {
        Self::named("entangling_probe").with_parameter("theta", theta)
    }

    pub fn custom_unitary(forward: Option<Unitary>, backward: Option<Unitary>) -> Self {
        AttackCatalogEntry {
            unitary_forward: forward,
            unitary_backward: backward,
            ..Self::named("custom_unitary")
        }
    }

    pub fn with_parameter(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    pub fn theta(&self) -> Option<f64> {
        self.parameters.get("theta").copied()
    }
}

impl fmt::Display for AttackCatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        let mut parts = Vec::new();
        if let Some(p) = self.basis_policy {
            parts.push(p.name().to_string());
        }
        if let Some(l) = self.legs {
            parts.push(l.name().to_string());
        }
        for (k, v) in &self.parameters {
            parts.push(format!("{k}={v}"));
        }
        if !parts.is_empty() {
            write!(f, "({})", parts.join(","))?;
        }
        Ok(())
    }
}

/// The attacks used for robustness checks: the baseline, every
/// intercept-resend policy/leg combination, and the entangling probe at
/// θ ∈ {0, π/8, π/4, 3π/8, π/2}.
pub fn standard_catalog() -> Vec<AttackCatalogEntry> {
    let mut catalog = vec![AttackCatalogEntry::none()];
    for policy in [BasisPolicy::AlwaysZ, BasisPolicy::AlwaysX, BasisPolicy::RandomPerRound] {
        for legs in [Legs::Forward, Legs::Backward, Legs::Both] {
            catalog.push(AttackCatalogEntry::intercept_resend(policy, legs));
        }
    }
    for k in 0..=4 {
        catalog.push(AttackCatalogEntry::entangling_probe(
            k as f64 * std::f64::consts::PI / 8.0,
        ));
    }
    catalog
}

pub type AttackFactory = fn(&AttackCatalogEntry) -> Result<Box<dyn AttackStrategy>, AttackError>;

/// Attack constructors keyed by name.
pub struct AttackRegistry {
    factories: BTreeMap<&'static str, AttackFactory>,
}

impl AttackRegistry {
    pub fn empty() -> Self {
        AttackRegistry {
            factories: BTreeMap::new(),
        }
    }

    pub fn standard() -> Self {
        let mut registry = AttackRegistry::empty();
        registry.register("none", |_| Ok(Box::new(NoAttack)));
        registry.register("intercept_resend", |entry| {
            let policy = entry.basis_policy.ok_or(AttackError::MissingParameter {
                attack: "intercept_resend",
                param: "basis_policy",
            })?;
            let legs = entry.legs.ok_or(AttackError::MissingParameter {
                attack: "intercept_resend",
                param: "legs",
            })?;
            Ok(Box::new(intercept_resend(policy, legs)))
        });
        registry.register("entangling_probe", |entry| {
            let theta = entry.theta().ok_or(AttackError::MissingParameter {
                attack: "entangling_probe",
                param: "theta",
            })?;
            Ok(Box::new(entangling_probe(theta)?))
        });
        registry.register("custom_unitary", |entry| {
            Ok(Box::new(CustomUnitary::new(
                entry.unitary_forward.clone(),
                entry.unitary_backward.clone(),
            )?))
        });
        registry
    }

    pub fn register(&mut self, name: &'static str, factory: AttackFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn build(&self, entry: &AttackCatalogEntry) -> Result<Box<dyn AttackStrategy>, AttackError> {
        let factory = self
            .factories
            .get(entry.name.as_str())
            .ok_or_else(|| AttackError::UnknownAttack(entry.name.clone()))?;
        factory(entry)
    }
}

/// What Eve's presence cost her and what it bought her in one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EveReport {
    pub ctrl_error: f64,
    pub z_ctrl_error: f64,
    pub x_ctrl_error: f64,
    pub test_error: f64,
    /// Fraction of guessed INFO bits that were right; `None` when she guessed none.
    pub guess_accuracy: Option<f64>,
    /// Fraction of INFO bits Eve guessed at all.
    pub coverage: f64,
    pub guessed: usize,
    pub correct: usize,
}

/// Observed error rates and Eve's accuracy on the INFO bits of `run`.
pub fn eve_detection_and_gain(run: &RunResult) -> EveReport {
    let mut guessed = 0;
    let mut correct = 0;
    for (k, &i) in run.info_indices.iter().enumerate() {
        if let Some(Some(guess)) = run.eve_guesses.get(i) {
            guessed += 1;
            if *guess == run.alice_sifted[k] {
                correct += 1;
            }
        }
    }
    let info = run.info_indices.len();
    EveReport {
        ctrl_error: run.error_rates.ctrl().rate(),
        z_ctrl_error: run.error_rates.z_ctrl.rate(),
        x_ctrl_error: run.error_rates.x_ctrl.rate(),
        test_error: run.error_rates.test.rate(),
        guess_accuracy: (guessed > 0).then(|| correct as f64 / guessed as f64),
        coverage: if info == 0 { 0.0 } else { guessed as f64 / info as f64 },
        guessed,
        correct,
    }
}

/// Guesses for every SIFT round taken from `readout`, abstaining elsewhere.
pub(crate) fn guess_sift_rounds(
    transcript: &PublicTranscript,
    rounds: usize,
    readout: impl Fn(usize) -> Option<u8>,
) -> Vec<Option<u8>> {
    let mut guesses = vec![None; rounds];
    for i in transcript.sift_rounds() {
        if i < rounds {
            guesses[i] = readout(i);
        }
    }
    guesses
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{prepare, StateLabel};
    use crate::seed::rng_from_seed;

    #[test]
    fn no_attack_is_identity() {
        let mut rng = rng_from_seed(0);
        let mut eve = no_attack();
        for label in [StateLabel::ZERO, StateLabel::MINUS] {
            let s = prepare(label);
            assert_eq!(eve.on_forward(0, s.clone(), &mut rng).unwrap(), s);
            assert_eq!(eve.on_backward(0, s.clone(), &mut rng).unwrap(), s);
        }
        let guesses = eve.finalize(&PublicTranscript::default(), &[None, None]);
        assert!(guesses.iter().all(Option::is_none));
    }

    #[test]
    fn catalog_names_are_unique_and_buildable() {
        let registry = AttackRegistry::standard();
        let catalog = standard_catalog();
        let labels: std::collections::HashSet<_> = catalog.iter().map(|e| e.to_string()).collect();
        assert_eq!(labels.len(), catalog.len());
        for entry in &catalog {
            registry.build(entry).unwrap();
        }
    }

    #[test]
    fn registry_errors() {
        let registry = AttackRegistry::standard();
        assert!(matches!(
            registry.build(&AttackCatalogEntry::named("photon_split")),
            Err(AttackError::UnknownAttack(_))
        ));
        assert!(matches!(
            registry.build(&AttackCatalogEntry::named("entangling_probe")),
            Err(AttackError::MissingParameter { param: "theta", .. })
        ));
        assert!(matches!(
            registry.build(&AttackCatalogEntry::entangling_probe(2.0)),
            Err(AttackError::ThetaOutOfRange(_))
        ));
    }

    #[test]
    fn parse_policy_and_legs() {
        assert_eq!("always_Z".parse::<BasisPolicy>().unwrap(), BasisPolicy::AlwaysZ);
        assert_eq!(
            "random_per_round".parse::<BasisPolicy>().unwrap(),
            BasisPolicy::RandomPerRound
        );
        assert_eq!("both".parse::<Legs>().unwrap(), Legs::Both);
        assert!("sideways".parse::<Legs>().is_err());
    }
}
