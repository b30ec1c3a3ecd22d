//! Experiment configuration: parsing, defaults and validation.
//!
//! Two document shapes are accepted. The flat form is whitespace separated
//! `key=value` tokens with `#` comments:
//!
//! ```text
//! protocol=P1 gamma1=0.9 gamma2=0.9 xi=0.1 N=100000 seed=42
//! attack=entangling_probe attack.theta=0.3927
//! ```
//!
//! The JSON form is an object with the same keys; nested objects are joined
//! with `.` (`{"attack": {"name": "none"}}` is `attack.name=none`) and arrays
//! become comma-separated lists.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_8;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde_json::Value;
use sqkd_core::adversary::{AttackCatalogEntry, AttackRegistry, BasisPolicy, Legs};
use sqkd_core::analysis::{SweepAxis, SweepParam};
use sqkd_core::protocol::{ProtocolConfig, ProtocolKind, DEFAULT_THRESHOLD};
use sqkd_core::quantum::Unitary;

use crate::CliError;

pub const DEFAULT_TRIALS: usize = 32;
pub const DEFAULT_WORKERS: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Sweep,
    AttackEval,
    VerifyGolden,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Sweep => "sweep",
            Command::AttackEval => "attack-eval",
            Command::VerifyGolden => "verify-golden",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(format!("unknown format {s:?} (expected csv or json)")),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        })
    }
}

/// Values given on the command line; each beats its configuration key.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    /// Contents of `SQKD_SEED`, used when `seed` is absent.
    pub env_seed: Option<String>,
    pub trials: Option<usize>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<ReportFormat>,
}

/// A validated experiment, ready to execute.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub command: Command,
    pub config: ProtocolConfig,
    pub attack: AttackCatalogEntry,
    pub axis: Option<SweepAxis>,
    pub trials: usize,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub format: ReportFormat,
    /// Keys that took their default value.
    pub defaulted: Vec<&'static str>,
}

/// Raw key/value pairs from either document shape.
pub type RawConfig = BTreeMap<String, String>;

const KNOWN_KEYS: &[&str] = &[
    "protocol",
    "N",
    "gamma",
    "gamma1",
    "gamma2",
    "xi",
    "kappa",
    "tau",
    "lambda",
    "delta",
    "p_t",
    "seed",
    "exact_counts",
    "trials",
    "workers",
    "attack",
    "attack.name",
    "attack.theta",
    "attack.basis_policy",
    "attack.legs",
    "attack.unitary_forward",
    "attack.unitary_backward",
    "sweep.param",
    "sweep.values",
];

/// Splits a flat `key=value` document.
pub fn parse_flat(text: &str) -> Result<RawConfig, CliError> {
    let mut raw = RawConfig::new();
    for line in text.lines() {
        let content = line.split('#').next().unwrap_or("");
        for token in content.split_whitespace() {
            let Some((key, value)) = token.split_once('=') else {
                return Err(CliError::config(token, format!("expected key=value, found {token:?}")));
            };
            insert(&mut raw, key, value.to_string())?;
        }
    }
    Ok(raw)
}

/// Flattens a JSON object document.
pub fn parse_json(text: &str) -> Result<RawConfig, CliError> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| CliError::config("document", format!("malformed JSON: {e}")))?;
    let Value::Object(map) = doc else {
        return Err(CliError::config("document", "JSON configuration must be an object"));
    };
    let mut raw = RawConfig::new();
    flatten("", &Value::Object(map), &mut raw)?;
    Ok(raw)
}

fn flatten(prefix: &str, value: &Value, raw: &mut RawConfig) -> Result<(), CliError> {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, raw)?;
            }
            Ok(())
        }
        Value::Array(items) => {
            let parts = items.iter().map(|v| scalar(prefix, v)).collect::<Result<Vec<_>, _>>()?;
            insert(raw, prefix, parts.join(","))
        }
        other => insert(raw, prefix, scalar(prefix, other)?),
    }
}

fn scalar(key: &str, value: &Value) -> Result<String, CliError> {
    match value {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        _ => Err(CliError::config(key, "expected a string, number or boolean")),
    }
}

fn insert(raw: &mut RawConfig, key: &str, value: String) -> Result<(), CliError> {
    let key = if key == "n" { "N" } else { key };
    if !KNOWN_KEYS.contains(&key) {
        return Err(CliError::config(key, format!("unknown key {key:?}")));
    }
    if raw.insert(key.to_string(), value).is_some() {
        return Err(CliError::config(key, format!("{key} given more than once")));
    }
    Ok(())
}

/// Parses a document, choosing JSON when `is_json` is set.
pub fn parse_config(text: &str, is_json: bool) -> Result<RawConfig, CliError> {
    if is_json {
        parse_json(text)
    } else {
        parse_flat(text)
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::config(key, format!("{key} must be a finite number, found {value:?}")))
}

fn parse_count(key: &str, value: &str) -> Result<usize, CliError> {
    if let Ok(v) = value.parse::<usize>() {
        return Ok(v);
    }
    match value.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1e15 => Ok(v as usize),
        _ => Err(CliError::config(
            key,
            format!("{key} must be a non-negative integer, found {value:?}"),
        )),
    }
}

fn parse_u64(key: &str, value: &str) -> Result<u64, CliError> {
    value.parse::<u64>().map_err(|_| {
        CliError::config(
            key,
            format!("{key} must be an unsigned 64-bit integer, found {value:?}"),
        )
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(CliError::config(
            key,
            format!("{key} must be true or false, found {value:?}"),
        )),
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(key, s))
        .collect()
}

fn parse_unitary(key: &str, value: &str) -> Result<Unitary, CliError> {
    let values = parse_list(key, value)?;
    if values.len() != 32 {
        return Err(CliError::config(
            key,
            format!(
                "{key} needs 32 reals (4x4 row-major re,im pairs), found {}",
                values.len()
            ),
        ));
    }
    Unitary::from_real_pairs(4, &values).map_err(|e| CliError::config(key, e.to_string()))
}

/// Reads the protocol keys into a config. Keys that do not belong to the
/// chosen protocol are rejected.
fn build_config(raw: &RawConfig, defaulted: &mut Vec<&'static str>) -> Result<ProtocolConfig, CliError> {
    let get = |k: &str| raw.get(k).map(String::as_str);
    let protocol_text = get("protocol").ok_or_else(|| CliError::config("protocol", "protocol is required"))?;
    let protocol = ProtocolKind::from_str(&protocol_text.to_ascii_uppercase()).map_err(|_| {
        CliError::config(
            "protocol",
            format!("unknown protocol {protocol_text:?} (expected P1, P2, P3 or BASELINE)"),
        )
    })?;

    let require = |k: &'static str| {
        get(k).ok_or_else(|| CliError::config(k, format!("{k} is required for protocol {}", protocol.name())))
    };
    let reject = |keys: &[&'static str]| -> Result<(), CliError> {
        match keys.iter().find(|k| raw.contains_key(**k)) {
            Some(k) => Err(CliError::config(
                *k,
                format!("{k} is not used by protocol {}", protocol.name()),
            )),
            None => Ok(()),
        }
    };

    let mut config = match protocol {
        ProtocolKind::P1 => {
            reject(&["kappa", "tau", "lambda", "delta"])?;
            let (g1, g2) = match (get("gamma"), get("gamma1"), get("gamma2")) {
                (Some(g), None, None) => (parse_f64("gamma", g)?, parse_f64("gamma", g)?),
                (Some(_), _, _) => {
                    return Err(CliError::config("gamma", "gamma cannot be combined with gamma1/gamma2"))
                }
                (None, _, _) => (
                    parse_f64("gamma1", require("gamma1")?)?,
                    parse_f64("gamma2", require("gamma2")?)?,
                ),
            };
            ProtocolConfig::protocol1(
                parse_count("N", require("N")?)?,
                g1,
                g2,
                parse_f64("xi", require("xi")?)?,
            )
        }
        ProtocolKind::Baseline => {
            reject(&["gamma", "gamma1", "gamma2", "kappa", "tau", "lambda", "delta"])?;
            ProtocolConfig::baseline(parse_count("N", require("N")?)?, parse_f64("xi", require("xi")?)?)
        }
        ProtocolKind::P2 | ProtocolKind::P3 => {
            reject(&["gamma", "gamma1", "gamma2", "xi"])?;
            let kappa = parse_count("kappa", require("kappa")?)?;
            let tau = parse_count("tau", require("tau")?)?;
            let lambda = parse_count("lambda", require("lambda")?)?;
            let delta = parse_f64("delta", require("delta")?)?;
            let mut c = if protocol == ProtocolKind::P2 {
                ProtocolConfig::protocol2(kappa, tau, lambda, delta)
            } else {
                ProtocolConfig::protocol3(kappa, tau, lambda, delta)
            };
            if let Some(n) = get("N") {
                c.n = parse_count("N", n)?;
            }
            c
        }
    };

    match get("p_t") {
        Some(v) => config.p_t = parse_f64("p_t", v)?,
        None => {
            config.p_t = DEFAULT_THRESHOLD;
            defaulted.push("p_t");
        }
    }
    match get("exact_counts") {
        Some(v) => config.exact_counts = parse_bool("exact_counts", v)?,
        None => defaulted.push("exact_counts"),
    }
    Ok(config)
}

fn build_attack(raw: &RawConfig, defaulted: &mut Vec<&'static str>) -> Result<AttackCatalogEntry, CliError> {
    let get = |k: &str| raw.get(k).map(String::as_str);
    let name = match (get("attack"), get("attack.name")) {
        (Some(_), Some(_)) => {
            return Err(CliError::config(
                "attack",
                "give either attack or attack.name, not both",
            ))
        }
        (Some(n), None) | (None, Some(n)) => n,
        (None, None) => {
            defaulted.push("attack");
            "none"
        }
    };
    let registry = AttackRegistry::standard();
    if !registry.contains(name) {
        let known: Vec<&str> = registry.names().collect();
        return Err(CliError::config(
            "attack.name",
            format!("unknown attack {name:?} (known: {})", known.join(", ")),
        ));
    }
    let mut entry = AttackCatalogEntry::named(name);
    let allowed: &[&str] = match name {
        "intercept_resend" => &["attack.basis_policy", "attack.legs"],
        "entangling_probe" => &["attack.theta"],
        "custom_unitary" => &["attack.unitary_forward", "attack.unitary_backward"],
        _ => &[],
    };
    for key in raw.keys().filter(|k| k.starts_with("attack.") && *k != "attack.name") {
        if !allowed.contains(&key.as_str()) {
            return Err(CliError::config(
                key.as_str(),
                format!("{key} does not apply to attack {name}"),
            ));
        }
    }
    if let Some(v) = get("attack.theta") {
        entry = entry.with_parameter("theta", parse_f64("attack.theta", v)?);
    }
    if let Some(v) = get("attack.basis_policy") {
        entry.basis_policy = Some(BasisPolicy::from_str(v).map_err(|e| CliError::config("attack.basis_policy", e))?);
    }
    if let Some(v) = get("attack.legs") {
        entry.legs = Some(Legs::from_str(v).map_err(|e| CliError::config("attack.legs", e))?);
    }
    if let Some(v) = get("attack.unitary_forward") {
        entry.unitary_forward = Some(parse_unitary("attack.unitary_forward", v)?);
    }
    if let Some(v) = get("attack.unitary_backward") {
        entry.unitary_backward = Some(parse_unitary("attack.unitary_backward", v)?);
    }
    Ok(entry)
}

/// Checks the attack by building it; maps its complaint onto a config key.
fn check_attack(entry: &AttackCatalogEntry) -> Result<(), CliError> {
    AttackRegistry::standard().build(entry).map(|_| ()).map_err(|e| {
        let key = match entry.name.as_str() {
            "entangling_probe" => "attack.theta",
            "intercept_resend" if entry.basis_policy.is_none() => "attack.basis_policy",
            "intercept_resend" => "attack.legs",
            "custom_unitary" => "attack.unitary_forward",
            _ => "attack.name",
        };
        CliError::config(key, e.to_string())
    })
}

fn build_axis(
    raw: &RawConfig,
    command: Command,
    attack: &AttackCatalogEntry,
    defaulted: &mut Vec<&'static str>,
) -> Result<Option<SweepAxis>, CliError> {
    let param = raw.get("sweep.param");
    let values = raw.get("sweep.values");
    match (command, param, values) {
        (Command::Run | Command::VerifyGolden, _, _) => Ok(None),
        (_, Some(p), Some(v)) => {
            let param = SweepParam::from_str(p).map_err(|e| CliError::config("sweep.param", e))?;
            let values = parse_list("sweep.values", v)?;
            if values.is_empty() {
                return Err(CliError::config(
                    "sweep.values",
                    "sweep.values must list at least one value",
                ));
            }
            Ok(Some(SweepAxis { param, values }))
        }
        (Command::AttackEval, None, None) if attack.name == "entangling_probe" => {
            defaulted.push("sweep");
            Ok(Some(SweepAxis {
                param: SweepParam::Theta,
                values: (0..=4).map(|k| k as f64 * FRAC_PI_8).collect(),
            }))
        }
        (_, None, _) => Err(CliError::config(
            "sweep.param",
            format!("{} needs sweep.param", command.name()),
        )),
        (_, Some(_), None) => Err(CliError::config(
            "sweep.values",
            format!("{} needs sweep.values", command.name()),
        )),
    }
}

impl ExperimentSpec {
    /// Applies defaults and overrides, then validates every field, including
    /// each sweep grid point.
    pub fn from_raw(command: Command, raw: &RawConfig, overrides: &Overrides) -> Result<Self, CliError> {
        let mut defaulted = Vec::new();
        let mut config = build_config(raw, &mut defaulted)?;
        let attack = build_attack(raw, &mut defaulted)?;

        config.seed = match (overrides.seed, overrides.env_seed.as_deref(), raw.get("seed")) {
            (Some(s), _, _) => s,
            (None, Some(env), _) => parse_u64("SQKD_SEED", env.trim())?,
            (None, None, Some(s)) => parse_u64("seed", s)?,
            (None, None, None) => {
                defaulted.push("seed");
                0
            }
        };
        let trials = match (overrides.trials, raw.get("trials")) {
            (Some(t), _) => t,
            (None, Some(t)) => parse_count("trials", t)?,
            (None, None) => {
                defaulted.push("trials");
                DEFAULT_TRIALS
            }
        };
        if trials == 0 {
            return Err(CliError::config("trials", "trials must be at least 1"));
        }
        let workers = match (overrides.workers, raw.get("workers")) {
            (Some(w), _) => w,
            (None, Some(w)) => parse_count("workers", w)?,
            (None, None) => DEFAULT_WORKERS,
        };
        if workers == 0 {
            return Err(CliError::config("workers", "workers must be at least 1"));
        }

        config.validate()?;
        check_attack(&attack)?;
        let axis = build_axis(raw, command, &attack, &mut defaulted)?;
        if let Some(axis) = &axis {
            for &value in &axis.values {
                let mut c = config.clone();
                let mut a = attack.clone();
                axis.param.apply(&mut c, &mut a, value);
                if axis.param == SweepParam::Theta {
                    if a.name != "entangling_probe" {
                        return Err(CliError::config(
                            "sweep.param",
                            "theta sweeps need attack=entangling_probe",
                        ));
                    }
                    check_attack(&a).map_err(|e| CliError::config("sweep.values", e.to_string()))?;
                }
                if c.protocol == ProtocolKind::P1 && c.gamma1 == 0.5 && c.gamma2 == 0.5 {
                    // Runs as the symmetric baseline.
                    c.protocol = ProtocolKind::Baseline;
                }
                c.validate()
                    .map_err(|e| CliError::config("sweep.values", format!("value {value}: {e}")))?;
            }
        }

        Ok(ExperimentSpec {
            command,
            config,
            attack,
            axis,
            trials,
            workers,
            out: overrides.out.clone(),
            format: overrides.format.unwrap_or_default(),
            defaulted,
        })
    }

    /// `key=value` pairs echoed at the top of every report. Worker count is
    /// left out so reports do not depend on it.
    pub fn header(&self) -> Vec<(String, String)> {
        let c = &self.config;
        let mut h: Vec<(String, String)> = vec![
            ("command".into(), self.command.name().into()),
            ("protocol".into(), c.protocol.name().into()),
            ("N".into(), c.n.to_string()),
        ];
        match c.protocol {
            ProtocolKind::P1 | ProtocolKind::Baseline => {
                h.push(("gamma1".into(), c.gamma1.to_string()));
                h.push(("gamma2".into(), c.gamma2.to_string()));
                h.push(("xi".into(), c.xi.to_string()));
            }
            ProtocolKind::P2 | ProtocolKind::P3 => {
                h.push(("kappa".into(), c.kappa.to_string()));
                h.push(("tau".into(), c.tau.to_string()));
                h.push(("lambda".into(), c.lambda.to_string()));
                h.push(("delta".into(), c.delta.to_string()));
            }
        }
        h.push(("p_t".into(), c.p_t.to_string()));
        h.push(("exact_counts".into(), c.exact_counts.to_string()));
        h.push(("seed".into(), c.seed.to_string()));
        h.push(("trials".into(), self.trials.to_string()));
        h.push(("attack".into(), self.attack.to_string()));
        if let Some(axis) = &self.axis {
            h.push(("sweep.param".into(), axis.param.name().into()));
            let values: Vec<String> = axis.values.iter().map(f64::to_string).collect();
            h.push(("sweep.values".into(), values.join(",")));
        }
        h.push(("defaults".into(), self.defaulted.join(",")));
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> Result<ExperimentSpec, CliError> {
        ExperimentSpec::from_raw(Command::Run, &parse_flat(text)?, &Overrides::default())
    }

    fn key_of(r: Result<ExperimentSpec, CliError>) -> String {
        match r {
            Err(CliError::Config { key, .. }) => key,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn example_spec_is_valid() {
        let s = spec("protocol=P1 gamma1=0.9 gamma2=0.9 xi=0.1 N=100000 seed=42").unwrap();
        assert_eq!(s.config.n, 100_000);
        assert_eq!(s.config.seed, 42);
        assert_eq!(s.trials, DEFAULT_TRIALS);
        assert_eq!(s.config.p_t, 0.05);
        assert_eq!(s.defaulted, ["p_t", "exact_counts", "attack", "trials"]);
        let header = s.header();
        assert!(header
            .iter()
            .any(|(k, v)| k == "defaults" && v == "p_t,exact_counts,attack,trials"));
        assert!(header.iter().all(|(k, _)| k != "workers"));
    }

    #[test]
    fn range_errors_name_the_key() {
        let err = spec("protocol=P1 gamma1=0.4 gamma2=0.9 xi=0.1 N=100").unwrap_err();
        assert_eq!(err.to_string(), "gamma1 must satisfy 1/2 < gamma1 < 1");
        assert_eq!(key_of(spec("protocol=P1 gamma1=0.9 gamma2=0.9 xi=0.6 N=100")), "xi");
        assert_eq!(
            key_of(spec("protocol=P1 gamma1=0.9 gamma2=0.9 xi=0.1 N=100 p_t=0.7")),
            "p_t"
        );
        assert_eq!(
            key_of(spec("protocol=P1 gamma1=0.9 gamma2=0.9 xi=0.1 N=100 colour=red")),
            "colour"
        );
        assert_eq!(key_of(spec("protocol=P1 gamma1=0.9 gamma2=0.9 xi=0.1")), "N");
        assert_eq!(key_of(spec("protocol=P1 gamma=0.9 xi=0.1 N=10 kappa=3")), "kappa");
        assert_eq!(key_of(spec("protocol=P7")), "protocol");
        assert_eq!(key_of(spec("protocol=P2 kappa=10 tau=5 lambda=10 delta=0.1 N=3")), "N");
        assert_eq!(key_of(spec("protocol=P1 gamma=0.9 xi=0.1 N=10 N=11")), "N");
        assert_eq!(
            key_of(spec(
                "protocol=P1 gamma=0.9 xi=0.1 N=10 attack=entangling_probe attack.theta=3"
            )),
            "attack.theta"
        );
        assert_eq!(
            key_of(spec("protocol=P1 gamma=0.9 xi=0.1 N=10 attack=none attack.theta=1")),
            "attack.theta"
        );
        assert_eq!(
            key_of(spec(
                "protocol=P1 gamma=0.9 xi=0.1 N=10 attack=intercept_resend attack.legs=both"
            )),
            "attack.basis_policy"
        );
        assert_eq!(key_of(spec("protocol=P1 gamma=0.9 xi=0.1 N=abc")), "N");
        assert_eq!(key_of(spec("protocol=P1 gamma=0.9 xi=0.1 N=10 trials=0")), "trials");
        assert_eq!(key_of(spec("protocol=P1 gamma=0.9 xi=0.1 N=10 stray")), "stray");
    }

    #[test]
    fn seed_precedence() {
        let raw = parse_flat("protocol=BASELINE xi=0.1 N=10 seed=1").unwrap();
        let mut o = Overrides {
            env_seed: Some("2".into()),
            ..Overrides::default()
        };
        assert_eq!(ExperimentSpec::from_raw(Command::Run, &raw, &o).unwrap().config.seed, 2);
        o.seed = Some(3);
        assert_eq!(ExperimentSpec::from_raw(Command::Run, &raw, &o).unwrap().config.seed, 3);
        o = Overrides::default();
        assert_eq!(ExperimentSpec::from_raw(Command::Run, &raw, &o).unwrap().config.seed, 1);
        o.env_seed = Some("x".into());
        assert!(ExperimentSpec::from_raw(Command::Run, &raw, &o).is_err());
    }

    #[test]
    fn json_documents_flatten() {
        let raw = parse_json(
            r#"{"protocol": "P3", "kappa": 100, "tau": 10, "lambda": 100, "delta": 0.2,
                "attack": {"name": "entangling_probe", "theta": 0.5},
                "sweep": {"param": "theta", "values": [0, 0.5, 1.0]}}"#,
        )
        .unwrap();
        assert_eq!(raw["attack.theta"], "0.5");
        assert_eq!(raw["sweep.values"], "0,0.5,1.0");
        let s = ExperimentSpec::from_raw(Command::AttackEval, &raw, &Overrides::default()).unwrap();
        assert_eq!(s.axis.unwrap().values, vec![0.0, 0.5, 1.0]);
        assert!(parse_json("[1, 2]").is_err());
        assert!(parse_json("{\"protocol\": ").is_err());
        assert!(parse_json("{\"bogus\": 1}").is_err());
    }

    #[test]
    fn sweep_grid_checked_up_front() {
        let raw = parse_flat("protocol=P1 gamma=0.9 xi=0.1 N=100 sweep.param=xi sweep.values=0.1,0.7").unwrap();
        let err = ExperimentSpec::from_raw(Command::Sweep, &raw, &Overrides::default()).unwrap_err();
        assert!(matches!(err, CliError::Config { ref key, .. } if key == "sweep.values"));
        let raw = parse_flat("protocol=P1 gamma=0.9 xi=0.1 N=100 sweep.param=gamma sweep.values=0.5,0.9").unwrap();
        assert!(ExperimentSpec::from_raw(Command::Sweep, &raw, &Overrides::default()).is_ok());
        let raw = parse_flat("protocol=P1 gamma=0.9 xi=0.1 N=100").unwrap();
        assert!(ExperimentSpec::from_raw(Command::Sweep, &raw, &Overrides::default()).is_err());
    }

    #[test]
    fn probe_attack_eval_has_default_grid() {
        let raw =
            parse_flat("protocol=P3 kappa=100 tau=10 lambda=100 delta=0.2 attack=entangling_probe attack.theta=0")
                .unwrap();
        let s = ExperimentSpec::from_raw(Command::AttackEval, &raw, &Overrides::default()).unwrap();
        assert_eq!(s.axis.unwrap().values.len(), 5);
    }

    #[test]
    fn custom_unitary_from_pairs() {
        let cnot = "1,0,0,0,0,0,0,0, 0,0,1,0,0,0,0,0, 0,0,0,0,0,0,1,0, 0,0,0,0,1,0,0,0";
        let text = format!(
            "protocol=P1 gamma=0.9 xi=0.1 N=10 attack=custom_unitary attack.unitary_forward={}",
            cnot.replace(' ', "")
        );
        assert!(spec(&text).is_ok());
        let bad = text.replace("1,0,0,0,0,0,0,0,", "2,0,0,0,0,0,0,0,");
        assert_eq!(key_of(spec(&bad)), "attack.unitary_forward");
    }
}
