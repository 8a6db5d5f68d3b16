//! `sinh(x)/x`, its derivative, and composite Gauss-Legendre quadrature.

use crate::error::{FidelityError, Result};

/// Below this magnitude `s` and `s_prime` switch to truncated Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-2;

/// Default Gauss-Legendre order used throughout the crate.
pub const DEFAULT_ORDER: usize = 32;

/// `sinh(x) / x`, equal to 1 at the origin.
///
/// Overflows to `+inf` once `sinh` does (|x| above roughly 710).
pub fn s(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_THRESHOLD {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0))
    } else {
        x.sinh() / x
    }
}

/// Derivative of [`s`]: `(x cosh x - sinh x) / x^2`.
pub fn s_prime(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_THRESHOLD {
        let x2 = x * x;
        x / 3.0 * (1.0 + x2 / 10.0 * (1.0 + x2 / 28.0))
    } else if ax < 1.0 {
        // The closed form cancels badly here; sum sum_k 2k x^(2k-1) / (2k+1)!.
        let x2 = x * x;
        let mut term = x / 3.0;
        let mut sum = term;
        let mut k = 1.0;
        loop {
            // term_{k+1} / term_k = x^2 (k + 1) / (k (2k + 2)(2k + 3))
            term *= x2 * (k + 1.0) / (k * (2.0 * k + 2.0) * (2.0 * k + 3.0));
            sum += term;
            if term.abs() <= f64::EPSILON * 1e-2 * sum.abs() {
                break sum;
            }
            k += 1.0;
        }
    } else {
        (x * x.cosh() - x.sinh()) / (x * x)
    }
}

/// Sums with pairwise (cascade) summation; the order of operations is fixed
/// by the slice length alone.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let (lo, hi) = values.split_at(values.len() / 2);
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, applied on `panels`
/// equal subintervals.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panels: usize,
    // Order - 2 companion used for the error estimate; empty when order < 3.
    coarse_nodes: Vec<f64>,
    coarse_weights: Vec<f64>,
}

impl QuadratureRule {
    /// Single-panel rule of the given order.
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(FidelityError::Domain("quadrature order must be at least 1".into()));
        }
        let (nodes, weights) = legendre_nodes(order);
        let (coarse_nodes, coarse_weights) = if order >= 3 {
            legendre_nodes(order - 2)
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(Self {
            order,
            nodes,
            weights,
            panels: 1,
            coarse_nodes,
            coarse_weights,
        })
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.panels = panels.max(1);
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Absolute nodes and weights of the composite rule on `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        mapped_nodes(&self.nodes, &self.weights, self.panels, a, b)
    }

    fn mapped_coarse(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        mapped_nodes(&self.coarse_nodes, &self.coarse_weights, self.panels, a, b)
    }
}

fn mapped_nodes<'a>(
    nodes: &'a [f64],
    weights: &'a [f64],
    panels: usize,
    a: f64,
    b: f64,
) -> impl Iterator<Item = (f64, f64)> + 'a {
    let width = (b - a) / panels as f64;
    (0..panels).flat_map(move |p| {
        let lo = a + width * p as f64;
        let mid = lo + 0.5 * width;
        let half = 0.5 * width;
        nodes
            .iter()
            .zip(weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    })
}

/// Gauss-Legendre rule of the given order on a single panel.
pub fn gauss_legendre(order: usize) -> Result<QuadratureRule> {
    QuadratureRule::new(order)
}

/// Roots of `P_n` by Newton iteration from Chebyshev-like initial guesses,
/// with weights `2 / ((1 - x^2) P_n'(x)^2)`. Nodes are returned ascending.
fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Descending guesses; mirror into ascending order.
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Result of a one-dimensional quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// `|result(order) - result(order - 2)|`; `None` for orders below 3.
    pub error_estimate: Option<f64>,
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]`.
pub fn integrate_1d<F>(mut f: F, a: f64, b: f64, rule: &QuadratureRule) -> Result<Integral>
where
    F: FnMut(f64) -> f64,
{
    if !(a <= b) {
        return Err(FidelityError::Domain(format!(
            "integration bounds must satisfy a <= b, got [{a}, {b}]"
        )));
    }
    let mut sample = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(FidelityError::NonFinite { abscissa: x, value: v })
        }
    };
    let mut terms = Vec::with_capacity(rule.order * rule.panels);
    for (x, w) in rule.mapped(a, b) {
        terms.push(w * sample(x)?);
    }
    let value = pairwise_sum(&terms);
    let error_estimate = if rule.coarse_nodes.is_empty() {
        None
    } else {
        terms.clear();
        for (x, w) in rule.mapped_coarse(a, b) {
            terms.push(w * sample(x)?);
        }
        Some((value - pairwise_sum(&terms)).abs())
    };
    Ok(Integral { value, error_estimate })
}
