//! Run configuration: scenario defaults, flat key-value config files, and
//! command-line overrides, resolved in that order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ratchet_core::{HbarEff, SystemParams};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config line {line} is not `key = value`: {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}: {reason}")]
    BadValue {
        key: &'static str,
        value: String,
        reason: String,
    },
    #[error("{0}")]
    Invalid(String),
}

/// Which prepared experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Appendix,
    Custom,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig1 => "fig1",
            Scenario::Fig2 => "fig2",
            Scenario::Fig3 => "fig3",
            Scenario::Fig4 => "fig4",
            Scenario::Appendix => "appendix",
            Scenario::Custom => "custom",
        }
    }
}

impl FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fig1" => Ok(Scenario::Fig1),
            "fig2" => Ok(Scenario::Fig2),
            "fig3" => Ok(Scenario::Fig3),
            "fig4" => Ok(Scenario::Fig4),
            "appendix" => Ok(Scenario::Appendix),
            "custom" => Ok(Scenario::Custom),
            other => Err(format!(
                "unknown scenario {other:?} (expected fig1|fig2|fig3|fig4|appendix|custom)"
            )),
        }
    }
}

/// Effective Planck constant as configured: the symbolic resonant value or a
/// number. Kept symbolic so the resonant fast path is never lost to parsing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HbarSpec {
    FourPi,
    Value(f64),
}

impl HbarSpec {
    pub fn to_core(self) -> HbarEff<f64> {
        match self {
            HbarSpec::FourPi => HbarEff::Resonant,
            HbarSpec::Value(v) => HbarEff::Value(v),
        }
    }

    pub fn value(self) -> f64 {
        self.to_core().value()
    }
}

impl fmt::Display for HbarSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HbarSpec::FourPi => write!(f, "4pi"),
            HbarSpec::Value(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for HbarSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "4pi" | "resonant" => Ok(HbarSpec::FourPi),
            other => other
                .parse::<f64>()
                .map(HbarSpec::Value)
                .map_err(|e| format!("expected `4pi` or a number: {e}")),
        }
    }
}

impl Serialize for HbarSpec {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

fn serialize_window<Ser: Serializer>(w: &(u64, u64), serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
    let mut seq = serializer.serialize_seq(Some(2))?;
    seq.serialize_element(&w.0)?;
    seq.serialize_element(&w.1)?;
    seq.end()
}

/// Fully resolved configuration of one invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub k: f64,
    pub alpha: f64,
    /// Ratchet phase in units of 2π (the scan axis convention).
    pub phi_over_2pi: f64,
    pub g: f64,
    pub hbar_eff: HbarSpec,
    pub epsilon: f64,
    pub grid_n: usize,
    pub kicks: u64,
    pub phi_scan: Option<Vec<f64>>,
    pub g_scan: Option<Vec<f64>>,
    pub n_traj: usize,
    pub n_max: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(serialize_with = "serialize_window")]
    pub avg_window: (u64, u64),
    #[serde(serialize_with = "serialize_window")]
    pub fit_window: (u64, u64),
}

/// A partial configuration: every key optional. Both the config file and the
/// command line produce one of these.
#[derive(Debug, Clone, Default)]
pub struct ConfigOverlay {
    pub scenario: Option<Scenario>,
    pub k: Option<f64>,
    pub alpha: Option<f64>,
    pub phi_over_2pi: Option<f64>,
    pub g: Option<f64>,
    pub hbar_eff: Option<HbarSpec>,
    pub epsilon: Option<f64>,
    pub grid_n: Option<usize>,
    pub kicks: Option<u64>,
    pub phi_scan: Option<Vec<f64>>,
    pub g_scan: Option<Vec<f64>>,
    pub n_traj: Option<usize>,
    pub n_max: Option<usize>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub avg_window: Option<(u64, u64)>,
    pub fit_window: Option<(u64, u64)>,
}

impl ConfigOverlay {
    pub fn scenario_or_default(&self) -> Scenario {
        self.scenario.unwrap_or(Scenario::Custom)
    }
}

pub fn parse_list(key: &'static str, raw: &str) -> Result<Vec<f64>, ConfigError> {
    let items: Result<Vec<f64>, _> = raw
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect();
    let items = items.map_err(|e| ConfigError::BadValue {
        key,
        value: raw.to_string(),
        reason: e.to_string(),
    })?;
    if items.is_empty() {
        return Err(ConfigError::BadValue {
            key,
            value: raw.to_string(),
            reason: "empty list".into(),
        });
    }
    Ok(items)
}

pub fn parse_window(key: &'static str, raw: &str) -> Result<(u64, u64), ConfigError> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(ConfigError::BadValue {
            key,
            value: raw.to_string(),
            reason: "expected `lo,hi`".into(),
        });
    }
    let lo = parts[0].parse::<u64>().map_err(|e| ConfigError::BadValue {
        key,
        value: raw.to_string(),
        reason: e.to_string(),
    })?;
    let hi = parts[1].parse::<u64>().map_err(|e| ConfigError::BadValue {
        key,
        value: raw.to_string(),
        reason: e.to_string(),
    })?;
    Ok((lo, hi))
}

/// Parses the flat `key = value` format: one pair per line, `#` or `;`
/// comments, blank lines ignored.
pub fn parse_config_file(path: &Path) -> Result<ConfigOverlay, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut overlay = ConfigOverlay::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line
            .split(['#', ';'])
            .next()
            .unwrap_or("")
            .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: idx + 1,
            text: raw_line.to_string(),
        })?;
        apply_key(&mut overlay, key.trim(), value.trim())?;
    }
    Ok(overlay)
}

fn parse_scalar<T: FromStr>(key: &'static str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| ConfigError::BadValue {
        key,
        value: value.to_string(),
        reason: e.to_string(),
    })
}

fn apply_key(overlay: &mut ConfigOverlay, key: &str, value: &str) -> Result<(), ConfigError> {
    match key {
        "scenario" => overlay.scenario = Some(parse_scalar("scenario", value)?),
        "k" => overlay.k = Some(parse_scalar("k", value)?),
        "alpha" => overlay.alpha = Some(parse_scalar("alpha", value)?),
        "phi_over_2pi" => overlay.phi_over_2pi = Some(parse_scalar("phi_over_2pi", value)?),
        "g" => overlay.g = Some(parse_scalar("g", value)?),
        "hbar_eff" => overlay.hbar_eff = Some(parse_scalar("hbar_eff", value)?),
        "epsilon" => overlay.epsilon = Some(parse_scalar("epsilon", value)?),
        "grid_n" => overlay.grid_n = Some(parse_scalar("grid_n", value)?),
        "kicks" => overlay.kicks = Some(parse_scalar("kicks", value)?),
        "phi_scan" => overlay.phi_scan = Some(parse_list("phi_scan", value)?),
        "g_scan" => overlay.g_scan = Some(parse_list("g_scan", value)?),
        "n_traj" => overlay.n_traj = Some(parse_scalar("n_traj", value)?),
        "n_max" => overlay.n_max = Some(parse_scalar("n_max", value)?),
        "seed" => overlay.seed = Some(parse_scalar("seed", value)?),
        "output_dir" => overlay.output_dir = Some(PathBuf::from(value)),
        "avg_window" => overlay.avg_window = Some(parse_window("avg_window", value)?),
        "fit_window" => overlay.fit_window = Some(parse_window("fit_window", value)?),
        other => return Err(ConfigError::UnknownKey(other.to_string())),
    }
    Ok(())
}

impl RunConfig {
    /// Baseline configuration for a scenario; figure scenarios carry the
    /// parameter sets of their corresponding data sets.
    pub fn defaults(scenario: Scenario) -> Self {
        let mut config = RunConfig {
            scenario,
            k: 1.0,
            alpha: 2.0,
            phi_over_2pi: 0.125,
            g: 0.0,
            hbar_eff: HbarSpec::Value(1.0),
            epsilon: SystemParams::<f64>::DEFAULT_EPSILON,
            grid_n: 2048,
            kicks: 100,
            phi_scan: None,
            g_scan: None,
            n_traj: 10_000,
            n_max: 64,
            seed: 7777,
            output_dir: PathBuf::from("out").join(scenario.name()),
            avg_window: (500, 1000),
            fit_window: (20, 100),
        };
        match scenario {
            Scenario::Fig1 => {
                config.hbar_eff = HbarSpec::FourPi;
                config.g = 10.0;
                config.grid_n = 4096;
                config.kicks = 100;
            }
            Scenario::Fig2 => {
                config.hbar_eff = HbarSpec::FourPi;
                config.g = 10.0;
                config.grid_n = 4096;
                config.kicks = 100;
                config.phi_scan = Some((0..16).map(|i| i as f64 / 16.0).collect());
                config.g_scan = Some(vec![0.0, 1.0, 5.0, 10.0]);
            }
            Scenario::Fig3 => {
                config.kicks = 1000;
                config.g_scan = Some(vec![0.0, 0.3, 0.5, 1.0, 2.0]);
            }
            Scenario::Fig4 => {
                config.kicks = 1000;
                config.phi_scan = Some((0..=20).map(|i| i as f64 * 0.025).collect());
            }
            Scenario::Appendix => {
                config.g = 3.0;
                config.kicks = 120;
                // the spreading density needs far more harmonics than the
                // generic default before the classical force is faithful
                config.n_max = 256;
                config.g_scan = Some(vec![2.0, 3.0]);
            }
            Scenario::Custom => {}
        }
        config
    }

    pub fn apply(&mut self, overlay: &ConfigOverlay) {
        if let Some(v) = overlay.k {
            self.k = v;
        }
        if let Some(v) = overlay.alpha {
            self.alpha = v;
        }
        if let Some(v) = overlay.phi_over_2pi {
            self.phi_over_2pi = v;
        }
        if let Some(v) = overlay.g {
            self.g = v;
        }
        if let Some(v) = overlay.hbar_eff {
            self.hbar_eff = v;
        }
        if let Some(v) = overlay.epsilon {
            self.epsilon = v;
        }
        if let Some(v) = overlay.grid_n {
            self.grid_n = v;
        }
        if let Some(v) = overlay.kicks {
            self.kicks = v;
        }
        if let Some(v) = &overlay.phi_scan {
            self.phi_scan = Some(v.clone());
        }
        if let Some(v) = &overlay.g_scan {
            self.g_scan = Some(v.clone());
        }
        if let Some(v) = overlay.n_traj {
            self.n_traj = v;
        }
        if let Some(v) = overlay.n_max {
            self.n_max = v;
        }
        if let Some(v) = overlay.seed {
            self.seed = v;
        }
        if let Some(v) = &overlay.output_dir {
            self.output_dir = v.clone();
        }
        if let Some(v) = overlay.avg_window {
            self.avg_window = v;
        }
        if let Some(v) = overlay.fit_window {
            self.fit_window = v;
        }
    }

    /// Builds the resolved configuration: scenario defaults, then the config
    /// file, then command-line overrides.
    pub fn resolve(
        file: Option<&ConfigOverlay>,
        cli: &ConfigOverlay,
    ) -> Result<Self, ConfigError> {
        let scenario = cli
            .scenario
            .or(file.and_then(|f| f.scenario))
            .unwrap_or(Scenario::Custom);
        let mut config = RunConfig::defaults(scenario);
        if let Some(file) = file {
            config.apply(file);
        }
        config.apply(cli);
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.grid_n < 8 || self.grid_n % 2 != 0 {
            return Err(ConfigError::Invalid(format!(
                "grid_n must be even and >= 8, got {}",
                self.grid_n
            )));
        }
        if !(self.hbar_eff.value() > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "hbar_eff must be positive, got {}",
                self.hbar_eff.value()
            )));
        }
        if self.epsilon < 0.0 || !self.epsilon.is_finite() {
            return Err(ConfigError::Invalid(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        for (name, v) in [("k", self.k), ("alpha", self.alpha), ("g", self.g)] {
            if !v.is_finite() {
                return Err(ConfigError::Invalid(format!("{name} must be finite")));
            }
        }
        for (name, scan) in [("phi_scan", &self.phi_scan), ("g_scan", &self.g_scan)] {
            if let Some(scan) = scan {
                if scan.is_empty() {
                    return Err(ConfigError::Invalid(format!("{name} must not be empty")));
                }
                if scan.iter().any(|v| !v.is_finite()) {
                    return Err(ConfigError::Invalid(format!("{name} must be finite")));
                }
            }
        }
        if self.n_traj == 0 {
            return Err(ConfigError::Invalid("n_traj must be positive".into()));
        }
        if self.n_max == 0 || self.n_max > self.grid_n / 2 {
            return Err(ConfigError::Invalid(format!(
                "n_max must be in [1, grid_n/2], got {}",
                self.n_max
            )));
        }
        if self.avg_window.0 > self.avg_window.1 || self.fit_window.0 > self.fit_window.1 {
            return Err(ConfigError::Invalid(
                "windows must satisfy lo <= hi".into(),
            ));
        }
        Ok(())
    }

    /// Physical parameters with the configured phase converted to radians.
    pub fn system_params(&self) -> Result<SystemParams<f64>, ConfigError> {
        self.system_params_with(self.phi_over_2pi, self.g)
    }

    /// Same, for an explicit scan point.
    pub fn system_params_with(
        &self,
        phi_over_2pi: f64,
        g: f64,
    ) -> Result<SystemParams<f64>, ConfigError> {
        SystemParams::new(
            self.k,
            self.alpha,
            phi_over_2pi * std::f64::consts::TAU,
            g,
            self.hbar_eff.to_core(),
        )
        .and_then(|p| p.with_epsilon(self.epsilon))
        .map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}
