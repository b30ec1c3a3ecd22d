use std::collections::BTreeMap;

use rand::RngCore;

use super::engine::{execute, Allocation, RoundPlan};
use super::{ProtocolConfig, ProtocolError, ProtocolKind, RunResult};
use crate::adversary::{AttackCatalogEntry, AttackRegistry, AttackStrategy};
use crate::seed::rng_from_seed;

/// One protocol variant, runnable against any attack.
pub trait Protocol: Send + Sync {
    fn kind(&self) -> ProtocolKind;

    fn run(
        &self,
        config: &ProtocolConfig,
        attack: &mut dyn AttackStrategy,
        rng: &mut dyn RngCore,
    ) -> Result<RunResult, ProtocolError>;
}

fn check_kind(expected: ProtocolKind, config: &ProtocolConfig) -> Result<(), ProtocolError> {
    if config.protocol != expected {
        return Err(ProtocolError::WrongProtocol {
            expected,
            got: config.protocol,
        });
    }
    config.validate()?;
    Ok(())
}

/// Four-state protocol with asymmetric γ₁/γ₂ choices (P1).
pub struct AsymmetricFourState;

impl Protocol for AsymmetricFourState {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::P1
    }

    fn run(
        &self,
        config: &ProtocolConfig,
        attack: &mut dyn AttackStrategy,
        rng: &mut dyn RngCore,
    ) -> Result<RunResult, ProtocolError> {
        check_kind(ProtocolKind::P1, config)?;
        let plan = RoundPlan {
            alice_z_probability: config.gamma1,
            all_plus: false,
            bob_sift_probability: config.gamma2,
            deferred_sift: false,
            publish_bases: true,
            allocation: Allocation::Fraction { xi: config.xi },
        };
        execute(&plan, config, attack, rng)
    }
}

/// P1 machinery with both choices uniform; the efficiency reference point.
pub struct SymmetricBaseline;

impl Protocol for SymmetricBaseline {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::Baseline
    }

    fn run(
        &self,
        config: &ProtocolConfig,
        attack: &mut dyn AttackStrategy,
        rng: &mut dyn RngCore,
    ) -> Result<RunResult, ProtocolError> {
        check_kind(ProtocolKind::Baseline, config)?;
        let forced = ProtocolConfig {
            gamma1: 0.5,
            gamma2: 0.5,
            ..config.clone()
        };
        let plan = RoundPlan {
            alice_z_probability: 0.5,
            all_plus: false,
            bob_sift_probability: 0.5,
            deferred_sift: false,
            publish_bases: true,
            allocation: Allocation::Fraction { xi: config.xi },
        };
        execute(&plan, &forced, attack, rng)
    }
}

/// Four-state protocol that keeps X-SIFT rounds by measuring every SIFT
/// return in Z after Bob's announcement (P2).
pub struct SiftReuse;

impl Protocol for SiftReuse {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::P2
    }

    fn run(
        &self,
        config: &ProtocolConfig,
        attack: &mut dyn AttackStrategy,
        rng: &mut dyn RngCore,
    ) -> Result<RunResult, ProtocolError> {
        check_kind(ProtocolKind::P2, config)?;
        execute(&quota_plan(config, false), config, attack, rng)
    }
}

/// Single-state variant of [`SiftReuse`]: every qubit is |+⟩ (P3).
pub struct AllPlus;

impl Protocol for AllPlus {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::P3
    }

    fn run(
        &self,
        config: &ProtocolConfig,
        attack: &mut dyn AttackStrategy,
        rng: &mut dyn RngCore,
    ) -> Result<RunResult, ProtocolError> {
        check_kind(ProtocolKind::P3, config)?;
        execute(&quota_plan(config, true), config, attack, rng)
    }
}

fn quota_plan(config: &ProtocolConfig, all_plus: bool) -> RoundPlan {
    RoundPlan {
        alice_z_probability: if all_plus { 0.0 } else { 0.5 },
        all_plus,
        bob_sift_probability: config.bob_sift_probability(),
        deferred_sift: true,
        publish_bases: false,
        allocation: Allocation::Quotas {
            kappa: config.kappa,
            tau: config.tau,
            lambda: config.lambda,
        },
    }
}

/// Protocols selectable by name at runtime.
pub struct ProtocolRegistry {
    protocols: BTreeMap<ProtocolKind, Box<dyn Protocol>>,
}

impl ProtocolRegistry {
    pub fn empty() -> Self {
        ProtocolRegistry {
            protocols: BTreeMap::new(),
        }
    }

    pub fn standard() -> Self {
        let mut registry = ProtocolRegistry::empty();
        registry.register(Box::new(AsymmetricFourState));
        registry.register(Box::new(SiftReuse));
        registry.register(Box::new(AllPlus));
        registry.register(Box::new(SymmetricBaseline));
        registry
    }

    pub fn register(&mut self, protocol: Box<dyn Protocol>) {
        self.protocols.insert(protocol.kind(), protocol);
    }

    pub fn get(&self, kind: ProtocolKind) -> Result<&dyn Protocol, ProtocolError> {
        self.protocols
            .get(&kind)
            .map(|p| p.as_ref())
            .ok_or_else(|| ProtocolError::UnknownProtocol(kind.to_string()))
    }

    pub fn by_name(&self, name: &str) -> Result<&dyn Protocol, ProtocolError> {
        let kind = name
            .parse::<ProtocolKind>()
            .map_err(|_| ProtocolError::UnknownProtocol(name.to_string()))?;
        self.get(kind)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.protocols.keys().map(|k| k.name())
    }
}

/// Runs `config` against a fresh instance of `attack`, seeding from `config.seed`.
pub fn simulate(config: &ProtocolConfig, attack: &AttackCatalogEntry) -> Result<RunResult, ProtocolError> {
    let mut strategy = AttackRegistry::standard().build(attack)?;
    let mut rng = rng_from_seed(config.seed);
    ProtocolRegistry::standard()
        .get(config.protocol)?
        .run(config, strategy.as_mut(), &mut rng)
}

pub fn run_protocol1(
    config: &ProtocolConfig,
    attack: &mut dyn AttackStrategy,
    rng: &mut dyn RngCore,
) -> Result<RunResult, ProtocolError> {
    AsymmetricFourState.run(config, attack, rng)
}

pub fn run_protocol2(
    config: &ProtocolConfig,
    attack: &mut dyn AttackStrategy,
    rng: &mut dyn RngCore,
) -> Result<RunResult, ProtocolError> {
    SiftReuse.run(config, attack, rng)
}

pub fn run_protocol3(
    config: &ProtocolConfig,
    attack: &mut dyn AttackStrategy,
    rng: &mut dyn RngCore,
) -> Result<RunResult, ProtocolError> {
    AllPlus.run(config, attack, rng)
}

pub fn run_baseline(
    config: &ProtocolConfig,
    attack: &mut dyn AttackStrategy,
    rng: &mut dyn RngCore,
) -> Result<RunResult, ProtocolError> {
    SymmetricBaseline.run(config, attack, rng)
}
