use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::AttackCatalogEntry;
use crate::protocol::{simulate, ProtocolConfig, ProtocolError, ProtocolKind, RunResult};
use crate::seed::derive_seed;

/// A configuration knob a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepParam {
    /// Sets γ₁ and γ₂ together.
    Gamma,
    Gamma1,
    Gamma2,
    Xi,
    N,
    Kappa,
    Tau,
    Lambda,
    Delta,
    PT,
    /// The attack's `theta` parameter.
    Theta,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Gamma => "gamma",
            SweepParam::Gamma1 => "gamma1",
            SweepParam::Gamma2 => "gamma2",
            SweepParam::Xi => "xi",
            SweepParam::N => "N",
            SweepParam::Kappa => "kappa",
            SweepParam::Tau => "tau",
            SweepParam::Lambda => "lambda",
            SweepParam::Delta => "delta",
            SweepParam::PT => "p_t",
            SweepParam::Theta => "theta",
        }
    }

    pub fn apply(self, config: &mut ProtocolConfig, attack: &mut AttackCatalogEntry, value: f64) {
        let count = || value.round().max(0.0) as usize;
        match self {
            SweepParam::Gamma => {
                config.gamma1 = value;
                config.gamma2 = value;
            }
            SweepParam::Gamma1 => config.gamma1 = value,
            SweepParam::Gamma2 => config.gamma2 = value,
            SweepParam::Xi => config.xi = value,
            SweepParam::N => config.n = count(),
            SweepParam::Kappa => config.kappa = count(),
            SweepParam::Tau => config.tau = count(),
            SweepParam::Lambda => config.lambda = count(),
            SweepParam::Delta => config.delta = value,
            SweepParam::PT => config.p_t = value,
            SweepParam::Theta => {
                attack.parameters.insert("theta".into(), value);
            }
        }
        config.refresh_round_count();
    }

    pub fn get(self, config: &ProtocolConfig, attack: &AttackCatalogEntry) -> f64 {
        match self {
            SweepParam::Gamma | SweepParam::Gamma1 => config.gamma1,
            SweepParam::Gamma2 => config.gamma2,
            SweepParam::Xi => config.xi,
            SweepParam::N => config.n as f64,
            SweepParam::Kappa => config.kappa as f64,
            SweepParam::Tau => config.tau as f64,
            SweepParam::Lambda => config.lambda as f64,
            SweepParam::Delta => config.delta,
            SweepParam::PT => config.p_t,
            SweepParam::Theta => attack.theta().unwrap_or(f64::NAN),
        }
    }

    fn is_gamma(self) -> bool {
        matches!(self, SweepParam::Gamma | SweepParam::Gamma1 | SweepParam::Gamma2)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let all = [
            SweepParam::Gamma,
            SweepParam::Gamma1,
            SweepParam::Gamma2,
            SweepParam::Xi,
            SweepParam::N,
            SweepParam::Kappa,
            SweepParam::Tau,
            SweepParam::Lambda,
            SweepParam::Delta,
            SweepParam::PT,
            SweepParam::Theta,
        ];
        all.into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown sweep parameter {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// One seeded run, flattened to the reported columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub protocol: ProtocolKind,
    pub param_name: String,
    pub param_value: f64,
    pub trial: usize,
    pub efficiency: f64,
    pub z_ctrl_err: f64,
    pub x_ctrl_err: f64,
    pub test_err: f64,
    pub aborted: bool,
    pub eve_accuracy: Option<f64>,
    pub eve_coverage: f64,
    /// Pooled over both CTRL categories.
    #[serde(skip)]
    pub ctrl_err: f64,
}

impl TrialRow {
    pub fn from_run(run: &RunResult, param_name: &str, param_value: f64, trial: usize) -> Self {
        let eve = run
            .eve_report
            .unwrap_or_else(|| crate::adversary::eve_detection_and_gain(run));
        TrialRow {
            protocol: run.config.protocol,
            param_name: param_name.to_string(),
            param_value,
            trial,
            efficiency: run.efficiency(),
            z_ctrl_err: run.error_rates.z_ctrl.rate(),
            x_ctrl_err: run.error_rates.x_ctrl.rate(),
            test_err: run.error_rates.test.rate(),
            aborted: run.aborted,
            eve_accuracy: eve.guess_accuracy,
            eve_coverage: eve.coverage,
            ctrl_err: run.error_rates.ctrl().rate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub protocol: ProtocolKind,
    pub param_value: f64,
    pub trials: usize,
    pub mean_efficiency: f64,
    pub sd_efficiency: f64,
    pub mean_z_ctrl_err: f64,
    pub mean_x_ctrl_err: f64,
    pub mean_ctrl_err: f64,
    pub mean_test_err: f64,
    pub abort_frequency: f64,
    /// Mean over the trials in which Eve guessed at least once.
    pub mean_eve_accuracy: Option<f64>,
    pub mean_eve_coverage: f64,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

impl PointSummary {
    pub fn from_rows(rows: &[TrialRow]) -> Self {
        let m = |f: fn(&TrialRow) -> f64| mean(rows.iter().map(f));
        let mean_efficiency = m(|r| r.efficiency);
        let sd_efficiency = if rows.len() > 1 {
            let ss: f64 = rows.iter().map(|r| (r.efficiency - mean_efficiency).powi(2)).sum();
            (ss / (rows.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        let accuracies: Vec<f64> = rows.iter().filter_map(|r| r.eve_accuracy).collect();
        PointSummary {
            protocol: rows.first().map_or(ProtocolKind::P1, |r| r.protocol),
            param_value: rows.first().map_or(f64::NAN, |r| r.param_value),
            trials: rows.len(),
            mean_efficiency,
            sd_efficiency,
            mean_z_ctrl_err: m(|r| r.z_ctrl_err),
            mean_x_ctrl_err: m(|r| r.x_ctrl_err),
            mean_ctrl_err: m(|r| r.ctrl_err),
            mean_test_err: m(|r| r.test_err),
            abort_frequency: m(|r| f64::from(u8::from(r.aborted))),
            mean_eve_accuracy: (!accuracies.is_empty()).then(|| mean(accuracies.into_iter())),
            mean_eve_coverage: m(|r| r.eve_coverage),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub summary: PointSummary,
    pub rows: Vec<TrialRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub param_name: String,
    pub grid: Vec<f64>,
    pub trials: usize,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// All trial rows, grid-major and trial-minor.
    pub fn rows(&self) -> impl Iterator<Item = &TrialRow> {
        self.points.iter().flat_map(|p| p.rows.iter())
    }
}

/// Runs `f` on a pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Runs `trials` independently seeded copies of `config` against `attack`.
///
/// Trial `t` uses `derive_seed(config.seed, grid_index, t)`, so the rows do
/// not depend on how many workers run them.
pub fn run_trials(
    config: &ProtocolConfig,
    attack: &AttackCatalogEntry,
    trials: usize,
    workers: usize,
    grid_index: u64,
    param: (&str, f64),
) -> Result<Vec<TrialRow>, ProtocolError> {
    config.validate()?;
    with_workers(workers, || {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let cfg = config.clone().with_seed(derive_seed(config.seed, grid_index, t as u64));
                let run = simulate(&cfg, attack)?;
                Ok(TrialRow::from_run(&run, param.0, param.1, t))
            })
            .collect()
    })
}

fn sweep(
    base: &ProtocolConfig,
    attack: &AttackCatalogEntry,
    axis: &SweepAxis,
    trials: usize,
    workers: usize,
    include_baseline: bool,
) -> Result<SweepResult, ProtocolError> {
    let mut points = Vec::with_capacity(axis.values.len() + 1);
    for (g, &value) in axis.values.iter().enumerate() {
        let mut cfg = base.clone();
        let mut att = attack.clone();
        axis.param.apply(&mut cfg, &mut att, value);
        if cfg.protocol == ProtocolKind::P1 && axis.param.is_gamma() && cfg.gamma1 == 0.5 && cfg.gamma2 == 0.5 {
            // γ₁ = γ₂ = 1/2 is the symmetric protocol itself.
            cfg.protocol = ProtocolKind::Baseline;
        }
        let rows = run_trials(&cfg, &att, trials, workers, g as u64, (axis.param.name(), value))?;
        points.push(SweepPoint {
            summary: PointSummary::from_rows(&rows),
            rows,
        });
    }

    let has_baseline = points.iter().any(|p| p.summary.protocol == ProtocolKind::Baseline);
    if include_baseline && !has_baseline {
        let cfg = baseline_for(base);
        let value = if axis.param.is_gamma() {
            0.5
        } else {
            axis.param.get(&cfg, attack)
        };
        let rows = run_trials(
            &cfg,
            attack,
            trials,
            workers,
            axis.values.len() as u64,
            (axis.param.name(), value),
        )?;
        points.push(SweepPoint {
            summary: PointSummary::from_rows(&rows),
            rows,
        });
    }

    Ok(SweepResult {
        param_name: axis.param.name().to_string(),
        grid: axis.values.clone(),
        trials,
        points,
    })
}

/// Symmetric reference run matched to `base`: same N and, for quota-sized
/// protocols, the same TEST share of the SIFT bits.
fn baseline_for(base: &ProtocolConfig) -> ProtocolConfig {
    let xi = if base.protocol.uses_quotas() {
        (base.tau as f64 / (base.kappa + base.tau) as f64).clamp(1e-6, 0.5 - 1e-6)
    } else {
        base.xi
    };
    ProtocolConfig {
        protocol: ProtocolKind::Baseline,
        gamma1: 0.5,
        gamma2: 0.5,
        xi,
        ..base.clone()
    }
}

/// Efficiency (`|INFO|/N`) across a parameter grid, with the symmetric
/// baseline appended when the grid does not already contain it.
pub fn efficiency_sweep(
    base: &ProtocolConfig,
    axis: &SweepAxis,
    trials: usize,
    attack: &AttackCatalogEntry,
    workers: usize,
) -> Result<SweepResult, ProtocolError> {
    sweep(base, attack, axis, trials, workers, true)
}

/// Error rates, abort frequency and Eve's gain across a grid of attack (or
/// protocol) parameters.
pub fn detection_sweep(
    base: &ProtocolConfig,
    attack: &AttackCatalogEntry,
    axis: &SweepAxis,
    trials: usize,
    workers: usize,
) -> Result<SweepResult, ProtocolError> {
    sweep(base, attack, axis, trials, workers, false)
}
