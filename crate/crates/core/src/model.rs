//! Shared domain types: ensembles, perturbations, time grids and curves.
//!
//! Energies are measured so that the mean level spacing at the band centre
//! is one, which puts the Heisenberg time at `tau = 1`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FidelityError, Result};

/// Dyson universality index of a Gaussian ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Beta {
    /// GOE, real symmetric matrices.
    Orthogonal,
    /// GUE, complex Hermitian matrices.
    Unitary,
    /// GSE, quaternion self-dual matrices.
    Symplectic,
}

impl Beta {
    pub const ALL: [Beta; 3] = [Beta::Orthogonal, Beta::Unitary, Beta::Symplectic];

    pub fn index(self) -> u8 {
        match self {
            Beta::Orthogonal => 1,
            Beta::Unitary => 2,
            Beta::Symplectic => 4,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.index())
    }

    pub fn name(self) -> &'static str {
        match self {
            Beta::Orthogonal => "GOE",
            Beta::Unitary => "GUE",
            Beta::Symplectic => "GSE",
        }
    }
}

impl TryFrom<u8> for Beta {
    type Error = FidelityError;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            1 => Ok(Beta::Orthogonal),
            2 => Ok(Beta::Unitary),
            4 => Ok(Beta::Symplectic),
            other => Err(FidelityError::Domain(format!(
                "beta must be 1, 2 or 4, got {other}"
            ))),
        }
    }
}

impl From<Beta> for u8 {
    fn from(beta: Beta) -> u8 {
        beta.index()
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// A Gaussian ensemble of `dim x dim` matrices.
///
/// For the symplectic ensemble `dim` counts quaternion entries; the complex
/// representation is `2 dim` wide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    beta: Beta,
    dim: usize,
}

impl EnsembleSpec {
    pub fn new(beta: Beta, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(FidelityError::Domain(format!(
                "matrix dimension must be at least 2, got {dim}"
            )));
        }
        Ok(Self { beta, dim })
    }

    pub fn beta(&self) -> Beta {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Width parameter of the Gaussian weight `exp(-Tr H^2 / (2 lambda))`:
    /// `2N / (beta pi^2)`.
    pub fn lambda_beta(&self) -> f64 {
        2.0 * self.dim as f64 / (self.beta.as_f64() * PI * PI)
    }

    /// Second moment `<|H_kl|^2>` of a matrix element, summed over its
    /// real, complex or quaternion components.
    pub fn variance_matrix_element(&self, diagonal: bool) -> f64 {
        let off = self.dim as f64 / (PI * PI);
        if diagonal {
            off * 2.0 / self.beta.as_f64()
        } else {
            off
        }
    }

    pub fn semicircle(&self) -> SemicircleDensity {
        SemicircleDensity { dim: self.dim }
    }
}

/// Perturbation strength `epsilon` of `H_phi = cos(phi) H0 + sin(phi) H1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    epsilon: f64,
}

impl PerturbationSpec {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(FidelityError::Domain(format!(
                "perturbation strength must be finite and non-negative, got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Mixing angle with `tan(phi) = sqrt(epsilon / (4 dim))`.
    pub fn phi(&self, dim: usize) -> f64 {
        (self.epsilon / (4.0 * dim as f64)).sqrt().atan()
    }
}

/// Strictly increasing, non-negative times in units of the Heisenberg time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    taus: Vec<f64>,
}

impl TimeGrid {
    pub fn new(taus: Vec<f64>) -> Result<Self> {
        if taus.is_empty() {
            return Err(FidelityError::Domain("time grid is empty".into()));
        }
        if let Some(bad) = taus.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
            return Err(FidelityError::Domain(format!(
                "time grid entries must be finite and non-negative, found {bad}"
            )));
        }
        if taus.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FidelityError::Domain(
                "time grid must be strictly increasing".into(),
            ));
        }
        Ok(Self { taus })
    }

    /// `steps` equally spaced points from `min` to `max` inclusive.
    pub fn uniform(min: f64, max: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(FidelityError::Domain(format!(
                "a uniform grid needs at least 2 steps, got {steps}"
            )));
        }
        if !(max > min) {
            return Err(FidelityError::Domain(format!(
                "grid maximum {max} must exceed minimum {min}"
            )));
        }
        let h = (max - min) / (steps - 1) as f64;
        let mut taus: Vec<f64> = (0..steps).map(|i| min + h * i as f64).collect();
        taus[steps - 1] = max;
        Self::new(taus)
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }
}

/// Fidelity amplitude sampled on a time grid.
///
/// `values` holds the real part. Monte Carlo curves also carry the standard
/// error of the mean and the magnitude of the mean imaginary part, which
/// vanishes on average and serves as a convergence diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve {
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    pub stderr: Option<Vec<f64>>,
    pub imag_diag: Option<Vec<f64>>,
}

impl FidelityCurve {
    pub fn exact(taus: Vec<f64>, values: Vec<f64>) -> Self {
        Self {
            taus,
            values,
            stderr: None,
            imag_diag: None,
        }
    }

    /// Evaluates `f` at every grid point.
    pub fn from_fn<F>(grid: &TimeGrid, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let values = grid
            .taus()
            .iter()
            .map(|&t| f(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::exact(grid.taus().to_vec(), values))
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// Checks lengths, the `[-1, 1 + delta]` range and `f(0) = 1`.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.taus.len();
        let lengths_ok = self.values.len() == n
            && self.stderr.as_ref().is_none_or(|s| s.len() == n)
            && self.imag_diag.as_ref().is_none_or(|s| s.len() == n);
        if !lengths_ok {
            return Err(FidelityError::Domain("curve field lengths differ".into()));
        }
        for (i, (&tau, &value)) in self.taus.iter().zip(&self.values).enumerate() {
            let slack = self.stderr.as_ref().map_or(1e-9, |s| 3.0 * s[i] + 1e-9);
            if !(value >= -1.0 - slack && value <= 1.0 + slack) {
                return Err(FidelityError::Domain(format!(
                    "f({tau}) = {value} lies outside [-1, 1]"
                )));
            }
            if tau == 0.0 && (value - 1.0).abs() > slack {
                return Err(FidelityError::Domain(format!(
                    "f(0) = {value}, expected 1"
                )));
            }
        }
        Ok(())
    }

    /// Interior grid points in the open window `(lo, hi)` that exceed both
    /// neighbours, as `(tau, f)`.
    pub fn local_maxima(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        (1..self.len().saturating_sub(1))
            .filter(|&i| self.taus[i] > lo && self.taus[i] < hi)
            .filter(|&i| self.values[i] > self.values[i - 1] && self.values[i] > self.values[i + 1])
            .map(|i| (self.taus[i], self.values[i]))
            .collect()
    }

    /// Height of the tallest local maximum in `(lo, hi)` above the lowest
    /// point between `lo` and that maximum; zero without a maximum.
    pub fn revival_prominence(&self, lo: f64, hi: f64) -> f64 {
        self.local_maxima(lo, hi)
            .into_iter()
            .map(|(peak_tau, peak)| {
                let floor = self
                    .taus
                    .iter()
                    .zip(&self.values)
                    .filter(|(t, _)| **t >= lo && **t <= peak_tau)
                    .map(|(_, v)| *v)
                    .fold(f64::INFINITY, f64::min);
                peak - floor
            })
            .fold(0.0, f64::max)
    }
}

/// Wigner semicircle normalized to one at the band centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemicircleDensity {
    dim: usize,
}

impl SemicircleDensity {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    /// Band edge `2N / pi`.
    pub fn radius(&self) -> f64 {
        2.0 * self.dim as f64 / PI
    }

    pub fn evaluate(&self, ebar: f64) -> Result<f64> {
        semicircle(self.dim, ebar)
    }

    /// Number of levels below `ebar`, measured from the band centre.
    pub fn counting(&self, ebar: f64) -> f64 {
        let u = (ebar / self.radius()).clamp(-1.0, 1.0);
        self.dim as f64 / PI * (u * (1.0 - u * u).sqrt() + u.asin())
    }
}

/// `2N / (beta pi^2)`.
pub fn lambda_beta(spec: &EnsembleSpec) -> f64 {
    spec.lambda_beta()
}

pub fn variance_matrix_element(spec: &EnsembleSpec, diagonal: bool) -> f64 {
    spec.variance_matrix_element(diagonal)
}

/// Mean level density `sqrt(1 - (pi ebar / 2N)^2)`.
pub fn semicircle(dim: usize, ebar: f64) -> Result<f64> {
    let u = PI * ebar / (2.0 * dim as f64);
    if !(u.abs() <= 1.0) {
        return Err(FidelityError::Domain(format!(
            "energy {ebar} lies outside the semicircle support for N = {dim}"
        )));
    }
    Ok((1.0 - u * u).max(0.0).sqrt())
}
