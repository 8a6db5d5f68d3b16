//! Exact GUE fidelity amplitude at the band centre.
//!
//! The amplitude is the elementary integral
//!
//! ```text
//! f(tau) = (1/tau) * int_0^min(tau,1) (1 + tau - 2y) exp(-(eps/2) tau (1 + tau - 2y)) dy
//! ```
//!
//! which evaluates to `exp(-a) [s(x) - c s'(x)]` with `s(x) = sinh(x)/x` and
//!
//! | branch      | `a`           | `x`           | `c`     |
//! |-------------|---------------|---------------|---------|
//! | `tau <= 1`  | `eps tau / 2` | `eps tau^2/2` | `tau`   |
//! | `tau > 1`   | `eps tau^2/2` | `eps tau / 2` | `1/tau` |
//!
//! Both branches meet at `tau = 1` with matching value, slope and curvature;
//! the third derivative jumps there by `+eps`.

use crate::error::{FidelityError, Result};
use crate::special::{gauss_legendre, integrate_1d, s, s_prime, QuadratureRule};

/// Order of the single-panel rule used by [`fidelity_gue_oracle`].
pub const ORACLE_ORDER: usize = 64;

/// Which side of the Heisenberg time a closed-form evaluation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GueBranch {
    UpToHeisenberg,
    BeyondHeisenberg,
}

/// Closed form `exp(-decay) [s(argument) - weight * s'(argument)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GueBranchForm {
    pub branch: GueBranch,
    pub decay: f64,
    pub argument: f64,
    pub weight: f64,
}

impl GueBranchForm {
    pub fn new(epsilon: f64, tau: f64) -> Self {
        let half = 0.5 * epsilon;
        if tau <= 1.0 {
            Self {
                branch: GueBranch::UpToHeisenberg,
                decay: half * tau,
                argument: half * tau * tau,
                weight: tau,
            }
        } else {
            Self {
                branch: GueBranch::BeyondHeisenberg,
                decay: half * tau * tau,
                argument: half * tau,
                weight: 1.0 / tau,
            }
        }
    }

    pub fn evaluate(&self) -> f64 {
        let (a, x, c) = (self.decay, self.argument, self.weight);
        if x <= 20.0 {
            (-a).exp() * (s(x) - c * s_prime(x))
        } else {
            // x <= a on both branches, so fold exp(-a) into sinh and cosh
            // to keep large perturbations finite.
            let grow = (x - a).exp();
            let shrink = (-x - a).exp();
            let sh = 0.5 * (grow - shrink);
            let ch = 0.5 * (grow + shrink);
            sh / x - c * (x * ch - sh) / (x * x)
        }
    }
}

fn check_inputs(epsilon: f64, tau: f64) -> Result<()> {
    if !(epsilon >= 0.0) || !(tau >= 0.0) || !epsilon.is_finite() || !tau.is_finite() {
        return Err(FidelityError::Domain(format!(
            "epsilon and tau must be finite and non-negative, got epsilon = {epsilon}, tau = {tau}"
        )));
    }
    Ok(())
}

/// Exact GUE fidelity amplitude in closed form.
pub fn fidelity_gue(epsilon: f64, tau: f64) -> Result<f64> {
    check_inputs(epsilon, tau)?;
    if tau == 0.0 {
        return Ok(1.0);
    }
    Ok(GueBranchForm::new(epsilon, tau).evaluate())
}

/// Default rule for [`fidelity_gue_oracle`]: one panel of order 64.
pub fn oracle_rule() -> QuadratureRule {
    gauss_legendre(ORACLE_ORDER).expect("order 64 is valid")
}

/// The defining single integral evaluated by quadrature. Independent of the
/// closed form; `tau = 0` is rejected because of the removable `1/tau`.
pub fn fidelity_gue_oracle(epsilon: f64, tau: f64, rule: &QuadratureRule) -> Result<f64> {
    check_inputs(epsilon, tau)?;
    if tau == 0.0 {
        return Err(FidelityError::Domain(
            "the integral representation needs tau > 0; f(0) = 1".into(),
        ));
    }
    let rate = 0.5 * epsilon * tau;
    let integrand = |y: f64| {
        let w = 1.0 + tau - 2.0 * y;
        w * (-rate * w).exp()
    };
    let integral = integrate_1d(integrand, 0.0, tau.min(1.0), rule)?;
    Ok(integral.value / tau)
}

/// First-order expansion in `epsilon` of the closed form.
pub fn fidelity_gue_small_eps(epsilon: f64, tau: f64) -> Result<f64> {
    check_inputs(epsilon, tau)?;
    let shape = if tau <= 1.0 {
        tau + tau.powi(3) / 3.0
    } else {
        1.0 / 3.0 + tau * tau
    };
    Ok(1.0 - 0.5 * epsilon * shape)
}

/// One-sided behaviour of the closed form at the Heisenberg time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisenbergContinuity {
    pub epsilon: f64,
    /// `|f(1+) - f(1)|` at a step of `1e-12`.
    pub value_jump: f64,
    pub slope_left: f64,
    pub slope_right: f64,
    pub curvature_left: f64,
    pub curvature_right: f64,
}

impl HeisenbergContinuity {
    pub fn slope_jump(&self) -> f64 {
        (self.slope_right - self.slope_left).abs()
    }

    pub fn curvature_jump(&self) -> f64 {
        (self.curvature_right - self.curvature_left).abs()
    }
}

/// Second-order one-sided differences of [`fidelity_gue`] at `tau = 1`.
pub fn heisenberg_continuity(epsilon: f64) -> Result<HeisenbergContinuity> {
    let f = |tau: f64| fidelity_gue(epsilon, tau);
    let at = f(1.0)?;
    let value_jump = (f(1.0 + 1e-12)? - at).abs();

    let h = 1e-5;
    let slope = |dir: f64| -> Result<f64> {
        Ok(dir * (-3.0 * at + 4.0 * f(1.0 + dir * h)? - f(1.0 + 2.0 * dir * h)?) / (2.0 * h))
    };
    let h2 = 2e-4;
    let curvature = |dir: f64| -> Result<f64> {
        let g = |k: f64| f(1.0 + dir * k * h2);
        Ok((2.0 * at - 5.0 * g(1.0)? + 4.0 * g(2.0)? - g(3.0)?) / (h2 * h2))
    };
    Ok(HeisenbergContinuity {
        epsilon,
        value_jump,
        slope_left: slope(-1.0)?,
        slope_right: slope(1.0)?,
        curvature_left: curvature(-1.0)?,
        curvature_right: curvature(1.0)?,
    })
}
