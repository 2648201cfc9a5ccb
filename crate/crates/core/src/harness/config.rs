//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! [environment]
//! scenario = lin_lin
//! d = 20
//!
//! [run]
//! algorithm = hte_igw
//! seeds = 1..=10
//! ```
//!
//! Every key can be overridden from the command line as
//! `section.key=value`. Unknown sections or keys are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::domain::{EpochSchedule, FeatureMap};
use crate::env::{EnvironmentSpec, Scenario};
use crate::error::{Error, Result};
use crate::parallel::Execution;
use crate::policy::{Algorithm, OracleConfig, PolicyConfig};

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureChoice {
    ArmBlock,
    Shared,
}

impl FeatureChoice {
    pub fn name(self) -> &'static str {
        match self {
            FeatureChoice::ArmBlock => "arm_block",
            FeatureChoice::Shared => "shared",
        }
    }

    pub fn build(self, d: usize, k: usize) -> Result<FeatureMap> {
        match self {
            FeatureChoice::ArmBlock => FeatureMap::arm_block(d, k),
            FeatureChoice::Shared => FeatureMap::shared(d, k),
        }
    }
}

/// One experiment: an environment, an algorithm and the seeds to run it on.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// The environment; its `seed` is replaced by each run seed.
    pub environment: EnvironmentSpec,
    pub algorithm: Algorithm,
    pub delta: f64,
    pub schedule: EpochSchedule,
    pub oracle: OracleConfig,
    pub features: FeatureChoice,
    pub n_min: u64,
    /// `None` derives the range from the environment's reward bounds.
    pub reward_range: Option<(f64, f64)>,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub execution: Execution,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            environment: EnvironmentSpec::new(Scenario::LinLin, 20, 2, 0.1, 5000, 0),
            algorithm: Algorithm::HteIgw,
            delta: 0.05,
            schedule: EpochSchedule::Doubling,
            oracle: OracleConfig::default(),
            features: FeatureChoice::ArmBlock,
            n_min: 32,
            reward_range: None,
            seeds: (1..=10).collect(),
            output_dir: PathBuf::from("out"),
            execution: Execution::Parallel,
        }
    }
}

#[rustfmt::skip]
const KEYS: &[(&str, &[&str])] = &[
    ("environment", &["scenario", "d", "num_actions", "sigma", "horizon", "amplitude", "period"]),
    ("run", &["algorithm", "seeds", "output", "delta", "schedule", "execution"]),
    ("oracle", &["features", "ridge_scale", "mu_ridge", "num_folds", "c_xi", "c_lambda"]),
    ("safety", &["n_min", "reward_lo", "reward_hi"]),
];

fn known(section: &str, key: &str) -> bool {
    KEYS.iter().any(|(s, keys)| *s == section && keys.contains(&key))
}

/// Raw `(section, key) -> value` entries, in file order of last assignment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<(String, String), String>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = ConfigMap::default();
        let mut section: Option<String> = None;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| config_err(format!("line {}: unterminated section header", no + 1)))?
                    .trim();
                if !KEYS.iter().any(|(s, _)| *s == name) {
                    return Err(config_err(format!("line {}: unknown section [{name}]", no + 1)));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("line {}: expected `key = value`", no + 1)))?;
            let sec = section
                .as_deref()
                .ok_or_else(|| config_err(format!("line {}: key outside of any section", no + 1)))?;
            map.set(sec, key.trim(), value.trim())?;
        }
        Ok(map)
    }

    pub fn set(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        if !known(section, key) {
            return Err(config_err(format!("unknown key `{section}.{key}`")));
        }
        self.entries
            .insert((section.to_string(), key.to_string()), value.to_string());
        Ok(())
    }

    /// Applies a `section.key=value` override.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (path, value) = spec
            .split_once('=')
            .ok_or_else(|| config_err(format!("override `{spec}` is not `section.key=value`")))?;
        let (section, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| config_err(format!("override `{spec}` must name `section.key`")))?;
        self.set(section, key, value.trim())
    }

    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries
            .get(&(section.to_string(), key.to_string()))
            .map(String::as_str)
    }
}

fn parse_value<T: std::str::FromStr>(section: &str, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| config_err(format!("`{section}.{key}`: cannot parse `{value}`")))
}

/// `doubling`, `fixed:<len>` or `explicit:<tau_1>,<tau_2>,...`.
pub fn parse_schedule(value: &str) -> Result<EpochSchedule> {
    let bad = |e: Error| config_err(format!("schedule `{value}`: {e}"));
    if value == "doubling" {
        return Ok(EpochSchedule::Doubling);
    }
    if let Some(len) = value.strip_prefix("fixed:") {
        let len: u64 = parse_value("run", "schedule", len.trim())?;
        return EpochSchedule::fixed(len).map_err(bad);
    }
    if let Some(list) = value.strip_prefix("explicit:") {
        let bounds = list
            .split(',')
            .map(|v| parse_value::<u64>("run", "schedule", v.trim()))
            .collect::<Result<Vec<_>>>()?;
        return EpochSchedule::explicit(bounds).map_err(bad);
    }
    Err(config_err(format!("unknown schedule `{value}`")))
}

pub fn schedule_text(schedule: &EpochSchedule) -> String {
    match schedule {
        EpochSchedule::Doubling => "doubling".to_string(),
        EpochSchedule::FixedLength(len) => format!("fixed:{len}"),
        EpochSchedule::Explicit(list) => {
            let parts: Vec<String> = list.iter().map(u64::to_string).collect();
            format!("explicit:{}", parts.join(","))
        }
    }
}

/// Comma-separated seeds and inclusive ranges `a..=b`.
pub fn parse_seeds(value: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..=") {
            let lo: u64 = parse_value("run", "seeds", lo.trim())?;
            let hi: u64 = parse_value("run", "seeds", hi.trim())?;
            if hi < lo {
                return Err(config_err(format!("empty seed range `{part}`")));
            }
            seeds.extend(lo..=hi);
        } else {
            seeds.push(parse_value("run", "seeds", part)?);
        }
    }
    if seeds.is_empty() {
        return Err(config_err("seed list must not be empty"));
    }
    Ok(seeds)
}

impl RunConfig {
    pub fn from_map(map: &ConfigMap) -> Result<Self> {
        let mut cfg = RunConfig::default();
        macro_rules! take {
            ($sec:literal, $key:literal, $target:expr) => {
                if let Some(v) = map.get($sec, $key) {
                    $target = parse_value($sec, $key, v)?;
                }
            };
        }
        if let Some(v) = map.get("environment", "scenario") {
            cfg.environment.scenario = v.parse().map_err(|e: Error| config_err(e.to_string()))?;
        }
        take!("environment", "d", cfg.environment.d);
        take!("environment", "num_actions", cfg.environment.num_actions);
        take!("environment", "sigma", cfg.environment.sigma);
        take!("environment", "horizon", cfg.environment.horizon);
        take!("environment", "amplitude", cfg.environment.amplitude);
        take!("environment", "period", cfg.environment.period);

        if let Some(v) = map.get("run", "algorithm") {
            cfg.algorithm = v.parse().map_err(|e: Error| config_err(e.to_string()))?;
        }
        if let Some(v) = map.get("run", "seeds") {
            cfg.seeds = parse_seeds(v)?;
        }
        if let Some(v) = map.get("run", "output") {
            cfg.output_dir = PathBuf::from(v);
        }
        take!("run", "delta", cfg.delta);
        if let Some(v) = map.get("run", "schedule") {
            cfg.schedule = parse_schedule(v)?;
        }
        if let Some(v) = map.get("run", "execution") {
            cfg.execution = v.parse().map_err(|e: Error| config_err(e.to_string()))?;
        }

        if let Some(v) = map.get("oracle", "features") {
            cfg.features = match v {
                "arm_block" => FeatureChoice::ArmBlock,
                "shared" => FeatureChoice::Shared,
                other => return Err(config_err(format!("unknown feature map `{other}`"))),
            };
        }
        take!("oracle", "ridge_scale", cfg.oracle.ridge_scale);
        take!("oracle", "mu_ridge", cfg.oracle.mu_ridge);
        take!("oracle", "num_folds", cfg.oracle.num_folds);
        take!("oracle", "c_xi", cfg.oracle.c_xi);
        take!("oracle", "c_lambda", cfg.oracle.c_lambda);

        take!("safety", "n_min", cfg.n_min);
        let bound = |key: &str| -> Result<Option<f64>> {
            match map.get("safety", key) {
                None | Some("auto") => Ok(None),
                Some(v) => parse_value("safety", key, v).map(Some),
            }
        };
        cfg.reward_range = match (bound("reward_lo")?, bound("reward_hi")?) {
            (None, None) => None,
            (Some(lo), Some(hi)) => Some((lo, hi)),
            _ => return Err(config_err("set both safety.reward_lo and safety.reward_hi, or neither")),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut map = ConfigMap::parse(text)?;
        for o in overrides {
            map.apply_override(o)?;
        }
        Self::from_map(&map)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, overrides)
    }

    pub fn validate(&self) -> Result<()> {
        self.environment.validate().map_err(|e| config_err(e.to_string()))?;
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(config_err(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if self.seeds.is_empty() {
            return Err(config_err("seed list must not be empty"));
        }
        if let Some((lo, hi)) = self.reward_range {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(config_err("reward range must satisfy lo < hi"));
            }
        }
        self.feature_map()?;
        Ok(())
    }

    pub fn feature_map(&self) -> Result<FeatureMap> {
        self.features
            .build(self.environment.d, self.environment.num_actions)
            .map_err(|e| config_err(e.to_string()))
    }

    /// Policy configuration for one run, given the reward range in force.
    pub fn policy_config(&self, reward_range: (f64, f64)) -> Result<PolicyConfig> {
        let mut cfg = PolicyConfig::new(self.algorithm, self.feature_map()?, reward_range);
        cfg.schedule = self.schedule.clone();
        cfg.delta = self.delta;
        cfg.oracle = self.oracle;
        cfg.n_min = self.n_min;
        Ok(cfg)
    }

    /// The fully resolved configuration in the file format; parsing it back
    /// yields an equal config.
    pub fn to_text(&self) -> String {
        let e = &self.environment;
        let o = &self.oracle;
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        let (lo, hi) = match self.reward_range {
            Some((lo, hi)) => (lo.to_string(), hi.to_string()),
            None => ("auto".to_string(), "auto".to_string()),
        };
        let mut s = String::new();
        let _ = writeln!(s, "[environment]");
        let _ = writeln!(s, "scenario = {}", e.scenario);
        let _ = writeln!(s, "d = {}", e.d);
        let _ = writeln!(s, "num_actions = {}", e.num_actions);
        let _ = writeln!(s, "sigma = {}", e.sigma);
        let _ = writeln!(s, "horizon = {}", e.horizon);
        let _ = writeln!(s, "amplitude = {}", e.amplitude);
        let _ = writeln!(s, "period = {}", e.period);
        let _ = writeln!(s, "\n[run]");
        let _ = writeln!(s, "algorithm = {}", self.algorithm);
        let _ = writeln!(s, "seeds = {}", seeds.join(","));
        let _ = writeln!(s, "output = {}", self.output_dir.display());
        let _ = writeln!(s, "delta = {}", self.delta);
        let _ = writeln!(s, "schedule = {}", schedule_text(&self.schedule));
        let _ = writeln!(
            s,
            "execution = {}",
            match self.execution {
                Execution::Sequential => "sequential",
                Execution::Parallel => "parallel",
            }
        );
        let _ = writeln!(s, "\n[oracle]");
        let _ = writeln!(s, "features = {}", self.features.name());
        let _ = writeln!(s, "ridge_scale = {}", o.ridge_scale);
        let _ = writeln!(s, "mu_ridge = {}", o.mu_ridge);
        let _ = writeln!(s, "num_folds = {}", o.num_folds);
        let _ = writeln!(s, "c_xi = {}", o.c_xi);
        let _ = writeln!(s, "c_lambda = {}", o.c_lambda);
        let _ = writeln!(s, "\n[safety]");
        let _ = writeln!(s, "n_min = {}", self.n_min);
        let _ = writeln!(s, "reward_lo = {lo}");
        let _ = writeln!(s, "reward_hi = {hi}");
        s
    }
}
