//! Spectral checks on sampled `H0` draws: central level spacing, the
//! semicircle density, Kramers degeneracy, and the two-level form factor.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linear_response::b2;
use crate::model::{Beta, SemicircleDensity};
use crate::sim::eigen::eigenvalues;
use crate::sim::ensemble::sample_matrix;
use crate::sim::estimator::{central_levels, SimulationConfig};
use crate::sim::rng::StreamKey;

/// Histogram bins across the full support `[-2N/pi, 2N/pi]`.
pub const HISTOGRAM_BINS: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub center: f64,
    pub width: f64,
    pub density: f64,
    /// Semicircle averaged over the bin.
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormFactorCheck {
    pub taus: Vec<f64>,
    pub empirical: Vec<f64>,
    pub expected: Vec<f64>,
    pub mean_abs_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub beta: Beta,
    pub dim: usize,
    pub draws: usize,
    /// Mean nearest-neighbour spacing of distinct levels in the central band.
    pub mean_spacing: f64,
    pub spacing_tolerance: f64,
    pub spacing_ok: bool,
    pub histogram: Vec<HistogramBin>,
    /// Largest relative density deviation over bins inside `|E| <= N/pi`.
    pub max_density_deviation: f64,
    pub density_tolerance: f64,
    pub density_ok: bool,
    pub spectrum_min: f64,
    pub spectrum_max: f64,
    /// Largest splitting within a Kramers pair over the mean spacing (GSE).
    pub kramers_max_splitting: Option<f64>,
    /// Empirical `1 - b2` on the central band (GOE and GUE only).
    pub form_factor: Option<FormFactorCheck>,
}

impl CalibrationReport {
    pub fn passed(&self) -> bool {
        self.spacing_ok && self.density_ok && self.kramers_max_splitting.is_none_or(|s| s <= 1e-8)
    }
}

/// Samples `cfg.outer_reals` unperturbed matrices and checks their spectra.
pub fn spectral_calibration(cfg: &SimulationConfig) -> Result<CalibrationReport> {
    cfg.validate()?;
    let spec = cfg.ensemble;
    let n = spec.dim();
    let beta = spec.beta();
    let spectra: Vec<Vec<f64>> = (0..cfg.outer_reals as u64)
        .into_par_iter()
        .map(|o| {
            let h = sample_matrix(&spec, StreamKey::new(cfg.seed, o, 0)?);
            eigenvalues(&h)
        })
        .collect::<Result<_>>()?;

    let mut kramers = None;
    let distinct: Vec<Vec<f64>> = if beta == Beta::Symplectic {
        let mut worst = 0.0f64;
        for s in &spectra {
            for pair in s.chunks(2) {
                worst = worst.max(pair[1] - pair[0]);
            }
        }
        kramers = Some(worst);
        spectra.iter().map(|s| s.iter().step_by(2).copied().collect()).collect()
    } else {
        spectra
    };

    let levels = central_levels(n, cfg.band_fraction)?;
    let (start, width) = (levels.start, levels.len());
    let mean_spacing = distinct
        .iter()
        .map(|s| (s[start + width - 1] - s[start]) / (width - 1) as f64)
        .sum::<f64>()
        / distinct.len() as f64;
    if let Some(k) = kramers.as_mut() {
        *k /= mean_spacing;
    }
    let spacing_tolerance = if beta == Beta::Symplectic { 0.05 } else { 0.02 };

    let rho = SemicircleDensity::new(n);
    let radius = rho.radius();
    let bin_width = 2.0 * radius / HISTOGRAM_BINS as f64;
    let mut counts = vec![0usize; HISTOGRAM_BINS];
    let mut spectrum_min = f64::INFINITY;
    let mut spectrum_max = f64::NEG_INFINITY;
    for s in &distinct {
        for &e in s {
            spectrum_min = spectrum_min.min(e);
            spectrum_max = spectrum_max.max(e);
            let idx = ((e + radius) / bin_width).floor();
            if idx >= 0.0 && (idx as usize) < HISTOGRAM_BINS {
                counts[idx as usize] += 1;
            }
        }
    }
    let draws = distinct.len() as f64;
    let histogram: Vec<HistogramBin> = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let lo = -radius + bin_width * i as f64;
            let hi = lo + bin_width;
            HistogramBin {
                center: lo + 0.5 * bin_width,
                width: bin_width,
                density: c as f64 / (draws * bin_width),
                expected: (rho.counting(hi) - rho.counting(lo)) / bin_width,
            }
        })
        .collect();
    let inner_edge = n as f64 / PI;
    let max_density_deviation = histogram
        .iter()
        .filter(|b| b.center.abs() + 0.5 * b.width <= inner_edge + 1e-9)
        .map(|b| (b.density / b.expected - 1.0).abs())
        .fold(0.0, f64::max);
    let density_tolerance = 0.05;

    let form_factor = match beta {
        Beta::Symplectic => None,
        _ => Some(form_factor_check(beta, &distinct, start, width)?),
    };

    Ok(CalibrationReport {
        beta,
        dim: n,
        draws: distinct.len(),
        mean_spacing,
        spacing_tolerance,
        spacing_ok: (mean_spacing - 1.0).abs() <= spacing_tolerance,
        histogram,
        max_density_deviation,
        density_tolerance,
        density_ok: max_density_deviation <= density_tolerance,
        spectrum_min,
        spectrum_max,
        kramers_max_splitting: kramers,
        form_factor,
    })
}

/// Connected form factor `(<|S|^2> - |<S>|^2) / M` with
/// `S(tau) = sum_n exp(2 pi i tau E_n)` over the `M` central levels.
fn form_factor_check(beta: Beta, spectra: &[Vec<f64>], start: usize, width: usize) -> Result<FormFactorCheck> {
    let taus: Vec<f64> = (1..=40).map(|i| 0.05 * i as f64).collect();
    let draws = spectra.len() as f64;
    let mut empirical = Vec::with_capacity(taus.len());
    let mut expected = Vec::with_capacity(taus.len());
    for &tau in &taus {
        let (mut sum_re, mut sum_im, mut sum_abs2) = (0.0, 0.0, 0.0);
        for s in spectra {
            let (mut re, mut im) = (0.0, 0.0);
            for &e in &s[start..start + width] {
                let (si, co) = (TAU * tau * e).sin_cos();
                re += co;
                im += si;
            }
            sum_re += re;
            sum_im += im;
            sum_abs2 += re * re + im * im;
        }
        let mean_re = sum_re / draws;
        let mean_im = sum_im / draws;
        let k = (sum_abs2 / draws - mean_re * mean_re - mean_im * mean_im) / width as f64;
        empirical.push(k);
        expected.push(1.0 - b2(beta, tau)?);
    }
    let mean_abs_deviation = empirical
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / taus.len() as f64;
    Ok(FormFactorCheck {
        taus,
        empirical,
        expected,
        mean_abs_deviation,
    })
}
