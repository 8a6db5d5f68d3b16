//! Command-line orchestration: runs one mode and writes its table.
//!
//! Progress and summaries go to the supplied log writer; data goes to the
//! output file only. The exit status is the single success channel.

pub mod config;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{FidelityError, Result};
use crate::goe::{verify_goe_identity, GoeIntegrator};
use crate::gue::{fidelity_gue, fidelity_gue_oracle, heisenberg_continuity, oracle_rule};
use crate::linear_response::{fidelity_lr, ResponseForm};
use crate::model::{Beta, FidelityCurve, TimeGrid};
use crate::sim::{estimate_curve, spectral_calibration, CalibrationReport};

pub use config::{CliArgs, Mode, OutputFormat, RunConfig};
pub use output::{read_csv, Record};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    VerificationFailed,
    Usage,
    Numerical,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::VerificationFailed => 1,
            ExitStatus::Usage => 2,
            ExitStatus::Numerical => 3,
        }
    }

    /// Bad input maps to a usage error, everything else to a numerical one.
    pub fn for_error(err: &FidelityError) -> Self {
        match err {
            FidelityError::Config(_) | FidelityError::Domain(_) => ExitStatus::Usage,
            _ => ExitStatus::Numerical,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub status: ExitStatus,
    pub output: PathBuf,
}

/// Grid of the GUE oracle-equivalence check: 300 points on `[0.01, 3]`.
pub fn oracle_check_grid() -> TimeGrid {
    TimeGrid::uniform(0.01, 3.0, 300).expect("fixed grid is valid")
}

/// 50 points on `(0, 3]`.
pub fn identity_check_grid() -> TimeGrid {
    TimeGrid::new((1..=50).map(|i| 0.06 * i as f64).collect()).expect("fixed grid is valid")
}

pub const VERIFY_EPSILONS: [f64; 5] = [0.2, 1.0, 2.0, 4.0, 10.0];
pub const CONTINUITY_EPSILONS: [f64; 4] = [0.2, 1.0, 4.0, 10.0];

/// One line of the `verify` report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

/// Exact curve for GOE or GUE.
pub fn analytic_curve(beta: Beta, epsilon: f64, grid: &TimeGrid) -> Result<FidelityCurve> {
    match beta {
        Beta::Orthogonal => {
            let goe = GoeIntegrator::default_instance();
            FidelityCurve::from_fn(grid, |t| goe.fidelity(epsilon, t))
        }
        Beta::Unitary => FidelityCurve::from_fn(grid, |t| fidelity_gue(epsilon, t)),
        Beta::Symplectic => Err(FidelityError::Config(
            "no analytic result exists for the GSE (beta = 4)".into(),
        )),
    }
}

pub fn lr_curve(beta: Beta, epsilon: f64, grid: &TimeGrid, form: ResponseForm) -> Result<FidelityCurve> {
    FidelityCurve::from_fn(grid, |t| fidelity_lr(beta, epsilon, t, form))
}

/// Runs the built-in self-checks.
pub fn verification_checks() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let identity = verify_goe_identity(&identity_check_grid(), 1e-6)?;
    checks.push(Check::at_most("goe_unperturbed_identity", identity.max_deviation, 1e-6));

    let rule = oracle_rule();
    for eps in VERIFY_EPSILONS {
        let mut worst = 0.0f64;
        for &tau in oracle_check_grid().taus() {
            let diff = fidelity_gue(eps, tau)? - fidelity_gue_oracle(eps, tau, &rule)?;
            worst = worst.max(diff.abs());
        }
        checks.push(Check::at_most(format!("gue_oracle_eps_{eps}"), worst, 1e-10));
    }

    for eps in CONTINUITY_EPSILONS {
        let c = heisenberg_continuity(eps)?;
        checks.push(Check::at_most(format!("gue_value_jump_eps_{eps}"), c.value_jump, 1e-8));
        checks.push(Check::at_most(format!("gue_slope_jump_eps_{eps}"), c.slope_jump(), 1e-4));
    }
    Ok(checks)
}

/// Executes one configuration, logging progress to `log`.
pub fn run<W: Write>(cfg: &RunConfig, log: &mut W) -> Result<RunOutcome> {
    cfg.validate()?;
    let path = cfg.output_path();
    let status = match cfg.mode {
        Mode::Analytic | Mode::Lr | Mode::Simulate | Mode::Compare => {
            let records = curve_records(cfg, log)?;
            write_records(cfg, &path, &records)?;
            ExitStatus::Success
        }
        Mode::Verify => {
            let checks = verification_checks()?;
            for c in &checks {
                writeln!(
                    log,
                    "{:<32} {:>12.3e}  (tol {:.0e})  {}",
                    c.name,
                    c.value,
                    c.tolerance,
                    if c.passed { "ok" } else { "FAILED" }
                )?;
            }
            if let Some(c) = checks.first() {
                writeln!(log, "max unperturbed GOE deviation from one: {:.3e}", c.value)?;
            }
            write_records(cfg, &path, &checks)?;
            if checks.iter().all(|c| c.passed) {
                ExitStatus::Success
            } else {
                ExitStatus::VerificationFailed
            }
        }
        Mode::Calibrate => {
            let report = spectral_calibration(&cfg.simulation(0.0)?)?;
            log_calibration(&report, log)?;
            match cfg.format {
                OutputFormat::Csv => output::write_csv(output::create(&path)?, &report.histogram)?,
                OutputFormat::Json => output::write_json(output::create(&path)?, cfg, &report)?,
            }
            if report.passed() {
                ExitStatus::Success
            } else {
                ExitStatus::VerificationFailed
            }
        }
    };
    writeln!(log, "wrote {}", path.display())?;
    Ok(RunOutcome { status, output: path })
}

fn write_records<T: Serialize>(cfg: &RunConfig, path: &std::path::Path, rows: &[T]) -> Result<()> {
    let file = output::create(path)?;
    match cfg.format {
        OutputFormat::Csv => output::write_csv(file, rows),
        OutputFormat::Json => output::write_json(file, cfg, rows),
    }
}

fn curve_records<W: Write>(cfg: &RunConfig, log: &mut W) -> Result<Vec<Record>> {
    let beta = cfg.beta()?;
    let grid = cfg.grid()?;
    let mut records = Vec::new();
    for &eps in &cfg.epsilon {
        let mut analytic = None;
        let mut simulated = None;
        if matches!(cfg.mode, Mode::Analytic | Mode::Compare) && beta != Beta::Symplectic {
            writeln!(log, "analytic beta={beta} eps={eps}")?;
            let curve = analytic_curve(beta, eps, &grid)?;
            records.extend(output::records_from_curve(&curve, "analytic", beta, eps));
            analytic = Some(curve);
        }
        if matches!(cfg.mode, Mode::Lr | Mode::Compare) {
            writeln!(log, "linear response beta={beta} eps={eps}")?;
            let lin = lr_curve(beta, eps, &grid, ResponseForm::Linear)?;
            let exp = lr_curve(beta, eps, &grid, ResponseForm::Exponentiated)?;
            records.extend(output::records_from_curve(&lin, "lr", beta, eps));
            records.extend(output::records_from_curve(&exp, "lr_exp", beta, eps));
        }
        if matches!(cfg.mode, Mode::Simulate | Mode::Compare) {
            writeln!(
                log,
                "simulate beta={beta} eps={eps} dim={} realizations={}x{} seed={}",
                cfg.dim, cfg.outer, cfg.inner, cfg.seed
            )?;
            let curve = estimate_curve(&cfg.simulation(eps)?)?;
            records.extend(output::records_from_curve(&curve, "simulate", beta, eps));
            simulated = Some(curve);
        }
        if cfg.mode == Mode::Compare {
            log_comparison(eps, analytic.as_ref(), simulated.as_ref(), log)?;
        }
    }
    Ok(records)
}

fn log_comparison<W: Write>(
    eps: f64,
    analytic: Option<&FidelityCurve>,
    simulated: Option<&FidelityCurve>,
    log: &mut W,
) -> Result<()> {
    if let (Some(a), Some(s)) = (analytic, simulated) {
        let stderr = s.stderr.as_deref().unwrap_or(&[]);
        let (mut worst, mut outside) = (0.0f64, 0usize);
        for i in 0..a.len() {
            let diff = (s.values[i] - a.values[i]).abs();
            worst = worst.max(diff);
            if diff > 3.0 * stderr.get(i).copied().unwrap_or(0.0) {
                outside += 1;
            }
        }
        writeln!(
            log,
            "eps={eps}: max |simulate - analytic| = {worst:.4}, {outside}/{} points beyond 3 stderr",
            a.len()
        )?;
    }
    for (name, curve) in [("analytic", analytic), ("simulate", simulated)] {
        if let Some(c) = curve {
            let peaks = c.local_maxima(0.8, 1.1);
            match peaks.first() {
                Some((t, f)) => writeln!(log, "eps={eps}: {name} local maximum f({t}) = {f:.5}")?,
                None => writeln!(log, "eps={eps}: {name} has no local maximum in (0.8, 1.1)")?,
            }
        }
    }
    Ok(())
}

fn log_calibration<W: Write>(r: &CalibrationReport, log: &mut W) -> Result<()> {
    writeln!(log, "beta={} dim={} draws={}", r.beta, r.dim, r.draws)?;
    writeln!(
        log,
        "central mean spacing {:.4} (tol {})  {}",
        r.mean_spacing,
        r.spacing_tolerance,
        if r.spacing_ok { "ok" } else { "FAILED" }
    )?;
    writeln!(
        log,
        "max density deviation {:.4} (tol {})  {}",
        r.max_density_deviation,
        r.density_tolerance,
        if r.density_ok { "ok" } else { "FAILED" }
    )?;
    writeln!(log, "spectrum range [{:.2}, {:.2}]", r.spectrum_min, r.spectrum_max)?;
    if let Some(k) = r.kramers_max_splitting {
        writeln!(log, "max Kramers splitting / spacing {k:.3e}")?;
    }
    if let Some(ff) = &r.form_factor {
        writeln!(log, "form factor mean |K - (1 - b2)| {:.4}", ff.mean_abs_deviation)?;
    }
    Ok(())
}
