//! Exact GOE fidelity amplitude from a singularity-free double integral.
//!
//! After the substitutions `u = tau sin(phi)`, `x = tau cos(phi) tan(alpha)`
//! the amplitude becomes
//!
//! ```text
//! f(tau) = 2 int_{phi_min}^{pi/2} dphi (1 - tau (1 - sin phi)) / (1 + sin phi)
//!          * int_0^phi dalpha cos(alpha) [(2 tau sin phi + 1) cos^2 alpha - tau cos^2 phi]
//!                         / sqrt(tau^2 cos^2 phi sin^2 alpha + (2 tau sin phi + 1) cos^2 alpha)
//!                         * exp(-(eps/2) tau zhat)
//! zhat = 2 tau sin phi + 1 - tau cos^2 phi / cos^2 alpha
//! phi_min = max(0, arcsin((tau - 1) / tau))
//! ```
//!
//! The integrand is bounded on the whole triangle `0 <= alpha <= phi`, so a
//! tensor-product Gauss-Legendre rule converges quickly. The inner interval
//! is remapped for every outer node.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{FidelityError, Result};
use crate::model::TimeGrid;
use crate::special::{gauss_legendre, pairwise_sum, QuadratureRule, DEFAULT_ORDER};

/// Default panels per dimension.
pub const DEFAULT_PANELS: usize = 8;

/// Time at which the unperturbed amplitude is pinned to one.
pub const NORMALIZATION_TAU: f64 = 0.5;

/// The double-integral integrand at fixed `(epsilon, tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoeIntegrand {
    pub epsilon: f64,
    pub tau: f64,
}

impl GoeIntegrand {
    /// Lower limit of the outer integral. The argument is clamped so that
    /// rounding near `tau = 1/2` or very large `tau` cannot leave `[-1, 1]`.
    pub fn phi_min(&self) -> f64 {
        let arg = ((self.tau - 1.0) / self.tau).clamp(-1.0, 1.0);
        arg.asin().max(0.0)
    }

    /// Exponent argument `zhat(phi, alpha)`.
    pub fn zhat(&self, phi: f64, alpha: f64) -> f64 {
        let (sp, cp) = phi.sin_cos();
        let ca = alpha.cos();
        2.0 * self.tau * sp + 1.0 - self.tau * cp * cp / (ca * ca)
    }

    /// Outer weight `(1 - tau (1 - sin phi)) / (1 + sin phi)`.
    pub fn outer_weight(&self, phi: f64) -> f64 {
        let sp = phi.sin();
        (1.0 - self.tau * (1.0 - sp)) / (1.0 + sp)
    }

    /// Inner integrand at `(phi, alpha)`.
    pub fn inner(&self, phi: f64, alpha: f64) -> f64 {
        let tau = self.tau;
        let (sp, cp) = phi.sin_cos();
        let (sa, ca) = alpha.sin_cos();
        let lift = 2.0 * tau * sp + 1.0;
        let cp2 = cp * cp;
        let ca2 = ca * ca;
        let numerator = ca * (lift * ca2 - tau * cp2);
        let radicand = tau * tau * cp2 * sa * sa + lift * ca2;
        if radicand <= 0.0 {
            // Only reachable on the closed corner alpha = phi = pi/2, where
            // the integrand vanishes.
            return 0.0;
        }
        let zhat = lift - tau * cp2 / ca2;
        numerator / radicand.sqrt() * (-0.5 * self.epsilon * tau * zhat).exp()
    }
}

/// Tensor-product quadrature of the GOE double integral with a frozen
/// normalization constant.
#[derive(Debug, Clone)]
pub struct GoeIntegrator {
    rule: QuadratureRule,
    normalization: f64,
}

impl GoeIntegrator {
    /// Builds the rule and fixes the normalization so that the unperturbed
    /// amplitude equals one at [`NORMALIZATION_TAU`].
    pub fn new(order: usize, panels: usize) -> Result<Self> {
        if order < 8 {
            return Err(FidelityError::Domain(format!(
                "GOE quadrature needs order >= 8, got {order}"
            )));
        }
        let rule = gauss_legendre(order)?.with_panels(panels);
        let mut integrator = Self { rule, normalization: 1.0 };
        let raw = integrator.raw(0.0, NORMALIZATION_TAU)?;
        integrator.normalization = 1.0 / raw;
        Ok(integrator)
    }

    /// Shared instance with order 32 and 8 panels per dimension.
    pub fn default_instance() -> &'static GoeIntegrator {
        static DEFAULT: OnceLock<GoeIntegrator> = OnceLock::new();
        DEFAULT.get_or_init(|| {
            GoeIntegrator::new(DEFAULT_ORDER, DEFAULT_PANELS).expect("default GOE rule is valid")
        })
    }

    /// Multiplier applied to the raw double integral (including its
    /// explicit factor 2). Equal to one up to quadrature error.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn fidelity(&self, epsilon: f64, tau: f64) -> Result<f64> {
        if !(epsilon >= 0.0) || !(tau >= 0.0) || !epsilon.is_finite() || !tau.is_finite() {
            return Err(FidelityError::Domain(format!(
                "epsilon and tau must be finite and non-negative, got epsilon = {epsilon}, tau = {tau}"
            )));
        }
        if tau == 0.0 {
            return Ok(1.0);
        }
        Ok(self.normalization * self.raw(epsilon, tau)?)
    }

    fn raw(&self, epsilon: f64, tau: f64) -> Result<f64> {
        let integrand = GoeIntegrand { epsilon, tau };
        let outer: Vec<(f64, f64)> = self.rule.mapped(integrand.phi_min(), FRAC_PI_2).collect();
        let terms: Vec<f64> = outer
            .par_iter()
            .map(|&(phi, w)| {
                let inner: Vec<f64> = self
                    .rule
                    .mapped(0.0, phi)
                    .map(|(alpha, v)| v * integrand.inner(phi, alpha))
                    .collect();
                w * integrand.outer_weight(phi) * pairwise_sum(&inner)
            })
            .collect();
        let value = 2.0 * pairwise_sum(&terms);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(FidelityError::NonFinite { abscissa: tau, value })
        }
    }
}

/// GOE fidelity amplitude with an explicit quadrature resolution.
pub fn fidelity_goe(epsilon: f64, tau: f64, order: usize, panels: usize) -> Result<f64> {
    if order == DEFAULT_ORDER && panels == DEFAULT_PANELS {
        GoeIntegrator::default_instance().fidelity(epsilon, tau)
    } else {
        GoeIntegrator::new(order, panels)?.fidelity(epsilon, tau)
    }
}

/// Outcome of checking `f_0(tau) = 1` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    pub max_deviation: f64,
    pub worst_tau: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Evaluates the unperturbed GOE amplitude on `grid` and compares it with
/// one. Since the normalization is pinned at a single time, this confirms
/// that the constant does not depend on `tau`.
pub fn verify_goe_identity(grid: &TimeGrid, tol: f64) -> Result<IdentityReport> {
    verify_unperturbed_identity(GoeIntegrator::default_instance(), grid, tol)
}

pub fn verify_unperturbed_identity(
    integrator: &GoeIntegrator,
    grid: &TimeGrid,
    tol: f64,
) -> Result<IdentityReport> {
    let values = grid
        .taus()
        .iter()
        .map(|&t| integrator.fidelity(0.0, t))
        .collect::<Result<Vec<_>>>()?;
    let (worst_tau, max_deviation) = grid
        .taus()
        .iter()
        .zip(&values)
        .map(|(&t, &f)| (t, (f - 1.0).abs()))
        .fold((f64::NAN, 0.0), |acc, x| if x.1 >= acc.1 { x } else { acc });
    Ok(IdentityReport {
        taus: grid.taus().to_vec(),
        values,
        max_deviation,
        worst_tau,
        tolerance: tol,
        passed: max_deviation <= tol,
    })
}
