//! Run configuration: command-line flags layered over an optional JSON file.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{FidelityError, Result};
use crate::model::{Beta, EnsembleSpec, PerturbationSpec, TimeGrid};
use crate::sim::estimator::{SimulationConfig, DEFAULT_BAND_FRACTION};

pub const DEFAULT_TAU_MIN: f64 = 0.0;
pub const DEFAULT_TAU_MAX: f64 = 3.0;
pub const DEFAULT_STEPS: usize = 301;
pub const DEFAULT_DIM: usize = 300;
pub const DEFAULT_OUTER: usize = 100;
pub const DEFAULT_INNER: usize = 20;

/// Environment variable that fixes the number of worker threads.
pub const WORKERS_ENV: &str = "FIDELITY_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Exact curve (GOE quadrature, GUE closed form).
    Analytic,
    /// Linear-response curves, plain and exponentiated.
    Lr,
    /// Monte Carlo estimate with standard errors.
    Simulate,
    /// Every applicable method on one grid.
    Compare,
    /// Built-in numerical self-checks.
    Verify,
    /// Spectral calibration of the sampler.
    Calibrate,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Lr => "lr",
            Mode::Simulate => "simulate",
            Mode::Compare => "compare",
            Mode::Verify => "verify",
            Mode::Calibrate => "calibrate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Command-line flags. Every flag is optional so that it can override a
/// value from `--config`.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "fidelity", version, about = "Fidelity amplitude of perturbed Gaussian ensembles")]
pub struct CliArgs {
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Ensemble index: 1 (GOE), 2 (GUE) or 4 (GSE).
    #[arg(long, value_parser = parse_beta)]
    pub beta: Option<Beta>,
    /// Perturbation strengths; repeat the flag or separate with commas.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub epsilon: Option<Vec<f64>>,
    #[arg(long)]
    pub tau_min: Option<f64>,
    #[arg(long)]
    pub tau_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub outer: Option<usize>,
    #[arg(long)]
    pub inner: Option<usize>,
    #[arg(long)]
    pub band_fraction: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// JSON file with the same field names; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_beta(s: &str) -> std::result::Result<Beta, String> {
    let v: u8 = s.parse().map_err(|_| format!("expected 1, 2 or 4, got '{s}'"))?;
    Beta::try_from(v).map_err(|e| e.to_string())
}

/// Fully resolved configuration of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default)]
    pub beta: Option<Beta>,
    #[serde(default)]
    pub epsilon: Vec<f64>,
    #[serde(default = "default_tau_min")]
    pub tau_min: f64,
    #[serde(default = "default_tau_max")]
    pub tau_max: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_outer")]
    pub outer: usize,
    #[serde(default = "default_inner")]
    pub inner: usize,
    #[serde(default = "default_band_fraction")]
    pub band_fraction: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

fn default_tau_min() -> f64 {
    DEFAULT_TAU_MIN
}
fn default_tau_max() -> f64 {
    DEFAULT_TAU_MAX
}
fn default_steps() -> usize {
    DEFAULT_STEPS
}
fn default_dim() -> usize {
    DEFAULT_DIM
}
fn default_outer() -> usize {
    DEFAULT_OUTER
}
fn default_inner() -> usize {
    DEFAULT_INNER
}
fn default_band_fraction() -> f64 {
    DEFAULT_BAND_FRACTION
}

/// File layer: like [`RunConfig`] but with every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    mode: Option<Mode>,
    beta: Option<Beta>,
    epsilon: Option<Vec<f64>>,
    tau_min: Option<f64>,
    tau_max: Option<f64>,
    steps: Option<usize>,
    dim: Option<usize>,
    outer: Option<usize>,
    inner: Option<usize>,
    band_fraction: Option<f64>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    format: Option<OutputFormat>,
    /// Free-form note, ignored.
    #[allow(dead_code)]
    description: Option<String>,
}

impl RunConfig {
    /// A configuration with defaults for everything but the mode.
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            beta: None,
            epsilon: Vec::new(),
            tau_min: DEFAULT_TAU_MIN,
            tau_max: DEFAULT_TAU_MAX,
            steps: DEFAULT_STEPS,
            dim: DEFAULT_DIM,
            outer: DEFAULT_OUTER,
            inner: DEFAULT_INNER,
            band_fraction: DEFAULT_BAND_FRACTION,
            seed: 0,
            output: None,
            format: OutputFormat::Csv,
        }
    }

    /// Reads the `--config` file, if any, then applies the flags.
    pub fn from_args(args: &CliArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => read_file_config(path)?,
            None => FileConfig::default(),
        };
        let mode = args.mode.or(file.mode).ok_or_else(|| {
            FidelityError::Config("no mode given; pass --mode or set \"mode\" in the config file".into())
        })?;
        let mut cfg = RunConfig::new(mode);
        macro_rules! layer {
            ($($field:ident),*) => {$(
                if let Some(v) = file.$field { cfg.$field = v; }
                if let Some(v) = args.$field.clone() { cfg.$field = v; }
            )*};
        }
        layer!(epsilon, tau_min, tau_max, steps, dim, outer, inner, band_fraction, seed, format);
        cfg.beta = args.beta.or(file.beta);
        cfg.output = args.output.clone().or(file.output);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let needs_curve = matches!(self.mode, Mode::Analytic | Mode::Lr | Mode::Simulate | Mode::Compare);
        if (needs_curve || self.mode == Mode::Calibrate) && self.beta.is_none() {
            return Err(FidelityError::Config(format!("mode {} needs --beta", self.mode.name())));
        }
        if needs_curve {
            if self.epsilon.is_empty() {
                return Err(FidelityError::Config(format!(
                    "mode {} needs at least one --epsilon",
                    self.mode.name()
                )));
            }
            if let Some(bad) = self.epsilon.iter().find(|e| !(**e >= 0.0) || !e.is_finite()) {
                return Err(FidelityError::Config(format!("epsilon must be finite and >= 0, got {bad}")));
            }
            self.grid()?;
        }
        if self.mode == Mode::Analytic && self.beta == Some(Beta::Symplectic) {
            return Err(FidelityError::Config(
                "no analytic result exists for the GSE (beta = 4); use --mode simulate or --mode lr".into(),
            ));
        }
        if matches!(self.mode, Mode::Simulate | Mode::Compare | Mode::Calibrate) {
            self.simulation(0.0)?.validate()?;
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        if self.steps < 2 {
            return Err(FidelityError::Config(format!("steps must be at least 2, got {}", self.steps)));
        }
        if !(self.tau_min >= 0.0) {
            return Err(FidelityError::Config(format!("tau-min must be >= 0, got {}", self.tau_min)));
        }
        TimeGrid::uniform(self.tau_min, self.tau_max, self.steps)
            .map_err(|e| FidelityError::Config(e.to_string()))
    }

    pub fn beta(&self) -> Result<Beta> {
        self.beta
            .ok_or_else(|| FidelityError::Config("beta is not set".into()))
    }

    /// Simulation settings for one perturbation strength.
    pub fn simulation(&self, epsilon: f64) -> Result<SimulationConfig> {
        let ensemble = EnsembleSpec::new(self.beta()?, self.dim)
            .map_err(|e| FidelityError::Config(e.to_string()))?;
        let grid = if self.mode == Mode::Calibrate {
            TimeGrid::new(vec![0.0])?
        } else {
            self.grid()?
        };
        Ok(SimulationConfig::new(ensemble, PerturbationSpec::new(epsilon)?, grid)
            .with_realizations(self.outer, self.inner)
            .with_band_fraction(self.band_fraction)
            .with_seed(self.seed))
    }

    /// `--output`, or `results/<mode>.<ext>`.
    pub fn output_path(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| {
            Path::new("results").join(format!("{}.{}", self.mode.name(), self.format.extension()))
        })
    }
}

fn read_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        FidelityError::Config(format!("cannot read config file {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| FidelityError::Config(format!("invalid config file {}: {e}", path.display())))
}

/// Worker count from [`WORKERS_ENV`], if set.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| FidelityError::Config(format!("{WORKERS_ENV} must be a positive integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig> {
        let cli = CliArgs::try_parse_from(std::iter::once("fidelity").chain(args.iter().copied()))
            .map_err(|e| FidelityError::Config(e.to_string()))?;
        RunConfig::from_args(&cli)
    }

    #[test]
    fn defaults() {
        let c = parse(&["--mode", "analytic", "--beta", "2", "--epsilon", "2"]).unwrap();
        assert_eq!(c.steps, 301);
        assert_eq!(c.dim, 300);
        assert_eq!((c.outer, c.inner), (100, 20));
        assert_eq!(c.grid().unwrap().taus()[100], 1.0);
        assert_eq!(c.output_path(), PathBuf::from("results/analytic.csv"));
    }

    #[test]
    fn epsilon_lists() {
        let c = parse(&["--mode", "lr", "--beta", "1", "--epsilon", "0.2,1", "--epsilon", "4"]).unwrap();
        assert_eq!(c.epsilon, vec![0.2, 1.0, 4.0]);
    }

    #[test]
    fn usage_errors() {
        assert!(parse(&["--beta", "2"]).is_err());
        assert!(parse(&["--mode", "analytic", "--epsilon", "1"]).is_err());
        assert!(parse(&["--mode", "analytic", "--beta", "2"]).is_err());
        assert!(parse(&["--mode", "analytic", "--beta", "4", "--epsilon", "1"]).is_err());
        assert!(parse(&["--mode", "analytic", "--beta", "3", "--epsilon", "1"]).is_err());
        assert!(parse(&["--mode", "lr", "--beta", "2", "--epsilon", "1", "--steps", "1"]).is_err());
        assert!(parse(&["--mode", "simulate", "--beta", "2", "--epsilon", "1", "--dim", "4"]).is_err());
        assert!(parse(&["--mode", "lr", "--beta", "2", "--epsilon=-1"]).is_err());
        assert!(parse(&["--mode", "verify"]).is_ok());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        std::fs::write(&path, r#"{"mode": "simulate", "beta": 1, "epsilon": [1.0], "dim": 80, "seed": 5}"#).unwrap();
        let c = parse(&["--config", path.to_str().unwrap(), "--seed", "9"]).unwrap();
        assert_eq!(c.mode, Mode::Simulate);
        assert_eq!(c.beta, Some(Beta::Orthogonal));
        assert_eq!(c.dim, 80);
        assert_eq!(c.seed, 9);

        std::fs::write(&path, r#"{"mode": "lr", "bogus": 1}"#).unwrap();
        assert!(parse(&["--config", path.to_str().unwrap()]).is_err());
    }
}
