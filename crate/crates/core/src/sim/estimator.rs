//! Monte Carlo estimate of the fidelity amplitude.
//!
//! For each pair `(H0, H_phi)` with eigenvalues `E^0_l`, `E^phi_k` and
//! overlap `R = R_phi^dagger R_0`,
//!
//! ```text
//! f(tau) = (1/|B|) sum_{l in B} sum_k exp(2 pi i tau (E^phi_k - E^0_l)) |R_kl|^2
//! ```
//!
//! where `B` is the central band of `H0` levels. Rows of `R` are unit
//! vectors, so every realization gives exactly `f(0) = 1`.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FidelityError, Result};
use crate::model::{Beta, EnsembleSpec, FidelityCurve, PerturbationSpec, TimeGrid};
use crate::sim::eigen::{diagonalize, EigenSystem};
use crate::sim::ensemble::{mix, sample_matrix};
use crate::sim::rng::{StreamKey, MAX_INNER, MAX_OUTER};

/// Fraction of central levels kept in the trace by default.
pub const DEFAULT_BAND_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub ensemble: EnsembleSpec,
    pub perturbation: PerturbationSpec,
    pub outer_reals: usize,
    pub inner_reals: usize,
    pub band_fraction: f64,
    pub seed: u64,
    pub taus: TimeGrid,
}

impl SimulationConfig {
    /// Desk-scale defaults: 100 outer x 20 inner realizations, 20% band.
    pub fn new(ensemble: EnsembleSpec, perturbation: PerturbationSpec, taus: TimeGrid) -> Self {
        Self {
            ensemble,
            perturbation,
            outer_reals: 100,
            inner_reals: 20,
            band_fraction: DEFAULT_BAND_FRACTION,
            seed: 0,
            taus,
        }
    }

    pub fn with_realizations(mut self, outer: usize, inner: usize) -> Self {
        self.outer_reals = outer;
        self.inner_reals = inner;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_band_fraction(mut self, fraction: f64) -> Self {
        self.band_fraction = fraction;
        self
    }

    pub fn phi(&self) -> f64 {
        self.perturbation.phi(self.ensemble.dim())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.band_fraction > 0.0 && self.band_fraction <= 1.0) {
            return Err(FidelityError::Config(format!(
                "band fraction must lie in (0, 1], got {}",
                self.band_fraction
            )));
        }
        if self.outer_reals == 0 || self.inner_reals == 0 {
            return Err(FidelityError::Config(
                "outer and inner realization counts must be at least 1".into(),
            ));
        }
        if self.outer_reals as u64 >= MAX_OUTER || self.inner_reals as u64 >= MAX_INNER {
            return Err(FidelityError::Config("too many realizations".into()));
        }
        self.band()?;
        Ok(())
    }

    /// Trace band as index range into the ascending eigenvalues of the
    /// stored representation. GSE bands hold whole Kramers pairs.
    pub fn band(&self) -> Result<std::ops::Range<usize>> {
        central_band(&self.ensemble, self.band_fraction)
    }
}

/// Central `ceil(fraction * N)` of `dim` distinct levels.
pub fn central_levels(dim: usize, fraction: f64) -> Result<std::ops::Range<usize>> {
    // Guard against 0.2 * 300 landing a hair above 60.
    let width = (((fraction * dim as f64) - 1e-9).ceil().max(0.0) as usize).min(dim);
    if width < 2 {
        return Err(FidelityError::Config(format!(
            "band of {width} level(s) is too small; raise dim or band_fraction"
        )));
    }
    let start = (dim - width) / 2;
    Ok(start..start + width)
}

/// [`central_levels`] as indices into the stored spectrum; GSE bands are
/// widened to whole Kramers pairs.
pub fn central_band(ensemble: &EnsembleSpec, fraction: f64) -> Result<std::ops::Range<usize>> {
    let levels = central_levels(ensemble.dim(), fraction)?;
    Ok(match ensemble.beta() {
        Beta::Symplectic => 2 * levels.start..2 * levels.end,
        _ => levels,
    })
}

/// Per-outer-realization sums, kept separately for error estimates.
#[derive(Debug, Clone)]
struct OuterMean {
    re: Vec<f64>,
    im: Vec<f64>,
}

/// Runs the simulation on the current rayon pool. The result is bitwise
/// independent of the number of worker threads.
pub fn estimate_curve(cfg: &SimulationConfig) -> Result<FidelityCurve> {
    cfg.validate()?;
    let taus = cfg.taus.taus().to_vec();
    let t = taus.len();
    if cfg.phi() == 0.0 {
        return Ok(FidelityCurve {
            taus,
            values: vec![1.0; t],
            stderr: Some(vec![0.0; t]),
            imag_diag: Some(vec![0.0; t]),
        });
    }

    let outer: Vec<OuterMean> = (0..cfg.outer_reals as u64)
        .into_par_iter()
        .map(|o| outer_realization(cfg, o))
        .collect::<Result<_>>()?;

    let count = outer.len() as f64;
    let mut values = vec![0.0; t];
    let mut imag = vec![0.0; t];
    let mut stderr = vec![0.0; t];
    for j in 0..t {
        let mean_re = outer.iter().map(|m| m.re[j]).sum::<f64>() / count;
        let mean_im = outer.iter().map(|m| m.im[j]).sum::<f64>() / count;
        values[j] = mean_re;
        imag[j] = mean_im.abs();
        if outer.len() > 1 {
            let var = outer.iter().map(|m| (m.re[j] - mean_re).powi(2)).sum::<f64>() / (count - 1.0);
            stderr[j] = (var / count).sqrt();
        }
    }
    Ok(FidelityCurve {
        taus,
        values,
        stderr: Some(stderr),
        imag_diag: Some(imag),
    })
}

fn outer_realization(cfg: &SimulationConfig, outer: u64) -> Result<OuterMean> {
    let band = cfg.band()?;
    let phi = cfg.phi();
    let h0 = sample_matrix(&cfg.ensemble, StreamKey::new(cfg.seed, outer, 0)?);
    let base = diagonalize(&h0)?;
    let t = cfg.taus.len();
    let mut re = vec![0.0; t];
    let mut im = vec![0.0; t];
    for inner in 0..cfg.inner_reals as u64 {
        let h1 = sample_matrix(&cfg.ensemble, StreamKey::new(cfg.seed, outer, inner + 1)?);
        let perturbed = diagonalize(&mix(&h0, &h1, phi))?;
        let (r, i) = pair_amplitude(&base, &perturbed, band.clone(), cfg.taus.taus());
        for j in 0..t {
            re[j] += r[j];
            im[j] += i[j];
        }
    }
    let n = cfg.inner_reals as f64;
    re.iter_mut().for_each(|v| *v /= n);
    im.iter_mut().for_each(|v| *v /= n);
    Ok(OuterMean { re, im })
}

/// Band-restricted amplitude of a single pair at every `tau`.
pub fn pair_amplitude(
    base: &EigenSystem,
    perturbed: &EigenSystem,
    band: std::ops::Range<usize>,
    taus: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let width = band.len();
    let weights = perturbed.overlap_weights(base, band.clone());
    let e0 = &base.values[band];
    let ep = &perturbed.values;
    let norm = width as f64;
    let mut re_out = Vec::with_capacity(taus.len());
    let mut im_out = Vec::with_capacity(taus.len());
    let mut back_re = vec![0.0; width];
    let mut back_im = vec![0.0; width];
    for &tau in taus {
        let w = TAU * tau;
        for (l, &e) in e0.iter().enumerate() {
            let (s, c) = (-w * e).sin_cos();
            back_re[l] = c;
            back_im[l] = s;
        }
        let mut acc_re = 0.0;
        let mut acc_im = 0.0;
        for (k, &e) in ep.iter().enumerate() {
            let row = &weights[k * width..(k + 1) * width];
            let mut v_re = 0.0;
            let mut v_im = 0.0;
            for l in 0..width {
                v_re += row[l] * back_re[l];
                v_im += row[l] * back_im[l];
            }
            let (s, c) = (w * e).sin_cos();
            acc_re += c * v_re - s * v_im;
            acc_im += c * v_im + s * v_re;
        }
        re_out.push(acc_re / norm);
        im_out.push(acc_im / norm);
    }
    (re_out, im_out)
}
