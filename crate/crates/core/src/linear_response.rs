//! Weak-perturbation baseline `f ~ 1 - eps C(tau)` and its exponentiated
//! form `exp(-eps C(tau))`, with
//!
//! ```text
//! C(tau) = tau^2/beta + tau/2 - int_0^tau int_0^t b2(t') dt' dt
//! ```
//!
//! where `1 - b2` is the two-level form factor of the ensemble. The double
//! integral is reduced to `int_0^tau (tau - t) b2(t) dt`.

use std::sync::OnceLock;

use crate::error::{FidelityError, Result};
use crate::model::Beta;
use crate::special::{gauss_legendre, integrate_1d, QuadratureRule, DEFAULT_ORDER};

/// Geometric refinement levels towards the GSE logarithmic singularity.
const GRADING_LEVELS: u32 = 30;

/// Standard two-level cluster function `b2` of a Gaussian ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormFactorB2 {
    pub beta: Beta,
}

impl FormFactorB2 {
    pub fn new(beta: Beta) -> Self {
        Self { beta }
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        b2(self.beta, t)
    }

    /// Points where `b2` is not smooth; quadrature panels are split there.
    fn breakpoints(&self) -> &'static [f64] {
        match self.beta {
            Beta::Orthogonal => &[1.0],
            Beta::Unitary => &[1.0],
            Beta::Symplectic => &[1.0, 2.0],
        }
    }
}

/// `b2(t)` for `t >= 0`; the spectral form factor is `1 - b2`.
pub fn b2(beta: Beta, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(FidelityError::Domain(format!(
            "form factor argument must be finite and non-negative, got {t}"
        )));
    }
    Ok(match beta {
        Beta::Unitary => {
            if t <= 1.0 {
                1.0 - t
            } else {
                0.0
            }
        }
        Beta::Orthogonal => {
            if t <= 1.0 {
                1.0 - 2.0 * t + t * (2.0 * t).ln_1p()
            } else {
                -1.0 + t * ((2.0 * t + 1.0) / (2.0 * t - 1.0)).ln()
            }
        }
        Beta::Symplectic => {
            if t == 1.0 {
                return Err(FidelityError::SingularPoint);
            }
            if t <= 2.0 {
                1.0 - 0.5 * t + 0.25 * t * (1.0 - t).abs().ln()
            } else {
                0.0
            }
        }
    })
}

/// Default rule for `C(tau)`: order 32 on four panels per segment.
pub fn default_rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| {
        gauss_legendre(DEFAULT_ORDER)
            .expect("default order is valid")
            .with_panels(4)
    })
}

/// Linear-response decay function `C(tau)`.
///
/// The unitary case is the closed form `tau/2 + tau^3/6` (`tau <= 1`) and
/// `tau^2/2 + 1/6` (`tau > 1`); the other ensembles are integrated
/// numerically with panels split at the kinks of `b2`. The logarithmic
/// singularity of the symplectic `b2` at `t = 1` is handled by geometric
/// grading, so no node ever lands on it.
pub fn c_of_tau(beta: Beta, tau: f64, rule: &QuadratureRule) -> Result<f64> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(FidelityError::Domain(format!(
            "tau must be finite and non-negative, got {tau}"
        )));
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    if beta == Beta::Unitary {
        return Ok(if tau <= 1.0 {
            0.5 * tau + tau.powi(3) / 6.0
        } else {
            0.5 * tau * tau + 1.0 / 6.0
        });
    }

    let form = FormFactorB2::new(beta);
    let singular = beta == Beta::Symplectic;
    let mut edges = vec![0.0];
    edges.extend(form.breakpoints().iter().copied().filter(|&p| p < tau));
    edges.push(tau);

    let weighted = |t: f64| {
        // Nodes never sit on t = 1, so the only error is the domain check.
        (tau - t) * b2(beta, t).unwrap_or(f64::NAN)
    };
    let mut double_integral = 0.0;
    for seg in edges.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let near_singular_hi = singular && hi == 1.0;
        let near_singular_lo = singular && lo == 1.0;
        double_integral += if near_singular_hi {
            graded(&weighted, lo, hi, GradeTowards::Upper, rule)?
        } else if near_singular_lo {
            graded(&weighted, lo, hi, GradeTowards::Lower, rule)?
        } else {
            integrate_1d(&weighted, lo, hi, rule)?.value
        };
    }
    Ok(tau * tau / beta.as_f64() + 0.5 * tau - double_integral)
}

#[derive(Clone, Copy)]
enum GradeTowards {
    Lower,
    Upper,
}

/// Integrates over `[lo, hi]` with pieces shrinking geometrically towards
/// one endpoint.
fn graded<F>(f: &F, lo: f64, hi: f64, towards: GradeTowards, rule: &QuadratureRule) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let len = hi - lo;
    let mut total = 0.0;
    let mut outer = len;
    for _ in 0..GRADING_LEVELS {
        let inner = 0.5 * outer;
        let (a, b) = match towards {
            GradeTowards::Upper => (hi - outer, hi - inner),
            GradeTowards::Lower => (lo + inner, lo + outer),
        };
        total += integrate_1d(f, a, b, rule)?.value;
        outer = inner;
    }
    let (a, b) = match towards {
        GradeTowards::Upper => (hi - outer, hi),
        GradeTowards::Lower => (lo, lo + outer),
    };
    total += integrate_1d(f, a, b, rule)?.value;
    Ok(total)
}

/// Linear or exponentiated linear-response law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseForm {
    Linear,
    Exponentiated,
}

/// `1 - eps C(tau)` or `exp(-eps C(tau))`.
pub fn fidelity_lr(beta: Beta, epsilon: f64, tau: f64, form: ResponseForm) -> Result<f64> {
    if !(epsilon >= 0.0) {
        return Err(FidelityError::Domain(format!(
            "perturbation strength must be non-negative, got {epsilon}"
        )));
    }
    let c = c_of_tau(beta, tau, default_rule())?;
    Ok(match form {
        ResponseForm::Linear => 1.0 - epsilon * c,
        ResponseForm::Exponentiated => (-epsilon * c).exp(),
    })
}
