//! Gaussian-ensemble sampling and the perturbed pair `(H0, H_phi)`.
//!
//! Element variances, with `v = N / pi^2`:
//!
//! | ensemble | off-diagonal                          | diagonal       |
//! |----------|---------------------------------------|----------------|
//! | GOE      | real, `v`                             | `2v`           |
//! | GUE      | real and imaginary parts, `v/2` each  | real, `v`      |
//! | GSE      | four quaternion components, `v/4` each| scalar, `v/2`  |
//!
//! GSE matrices are stored in their `2N x 2N` complex representation
//! `S (x) 1 + i (A1 (x) sx + A2 (x) sy + A3 (x) sz)` with `S` real symmetric and
//! `A_k` real antisymmetric, which commutes with the time reversal
//! `(1 (x) i sy) K` and is therefore Kramers degenerate.

use faer::{c64, Mat};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::model::{Beta, EnsembleSpec};
use crate::sim::rng::StreamKey;

/// A dense self-adjoint matrix in the representation of its ensemble.
#[derive(Debug, Clone)]
pub enum SelfAdjoint {
    Real(Mat<f64>),
    Complex(Mat<c64>),
}

impl SelfAdjoint {
    /// Rows of the stored representation (`2N` for the GSE).
    pub fn size(&self) -> usize {
        match self {
            SelfAdjoint::Real(m) => m.nrows(),
            SelfAdjoint::Complex(m) => m.nrows(),
        }
    }

    /// `a * self + b * other`; both operands must share a representation.
    pub fn combine(&self, a: f64, other: &SelfAdjoint, b: f64) -> SelfAdjoint {
        match (self, other) {
            (SelfAdjoint::Real(x), SelfAdjoint::Real(y)) => {
                SelfAdjoint::Real(Mat::from_fn(x.nrows(), x.ncols(), |i, j| {
                    a * x[(i, j)] + b * y[(i, j)]
                }))
            }
            (SelfAdjoint::Complex(x), SelfAdjoint::Complex(y)) => {
                SelfAdjoint::Complex(Mat::from_fn(x.nrows(), x.ncols(), |i, j| {
                    x[(i, j)] * a + y[(i, j)] * b
                }))
            }
            _ => panic!("cannot combine matrices of different representations"),
        }
    }

    /// Largest `|H_ij - conj(H_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.size();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..=i {
                let d = match self {
                    SelfAdjoint::Real(m) => (m[(i, j)] - m[(j, i)]).abs(),
                    SelfAdjoint::Complex(m) => (m[(i, j)] - m[(j, i)].conj()).norm(),
                };
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Largest deviation from the quaternion block structure
    /// `[[a, b], [-conj(b), conj(a)]]` of every 2x2 block.
    pub fn self_duality_defect(&self) -> Option<f64> {
        let SelfAdjoint::Complex(m) = self else {
            return None;
        };
        if m.nrows() % 2 != 0 {
            return None;
        }
        let mut worst = 0.0f64;
        for k in 0..m.nrows() / 2 {
            for l in 0..m.nrows() / 2 {
                let (r, c) = (2 * k, 2 * l);
                let d1 = (m[(r, c)] - m[(r + 1, c + 1)].conj()).norm();
                let d2 = (m[(r, c + 1)] + m[(r + 1, c)].conj()).norm();
                worst = worst.max(d1).max(d2);
            }
        }
        Some(worst)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        match self {
            SelfAdjoint::Real(m) => m.norm_l2(),
            SelfAdjoint::Complex(m) => m.norm_l2(),
        }
    }
}

/// Draws one matrix of the ensemble from the stream `key`.
pub fn sample_matrix(spec: &EnsembleSpec, key: StreamKey) -> SelfAdjoint {
    let mut rng = key.rng();
    let n = spec.dim();
    let v = spec.variance_matrix_element(false);
    let diag = spec.variance_matrix_element(true);
    match spec.beta() {
        Beta::Orthogonal => {
            let off = gaussian(v);
            let on = gaussian(diag);
            let mut m = Mat::<f64>::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = on.sample(&mut rng);
                for j in 0..i {
                    let x = off.sample(&mut rng);
                    m[(i, j)] = x;
                    m[(j, i)] = x;
                }
            }
            SelfAdjoint::Real(m)
        }
        Beta::Unitary => {
            let off = gaussian(0.5 * v);
            let on = gaussian(diag);
            let mut m = Mat::<c64>::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = c64::new(on.sample(&mut rng), 0.0);
                for j in 0..i {
                    let z = c64::new(off.sample(&mut rng), off.sample(&mut rng));
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
            SelfAdjoint::Complex(m)
        }
        Beta::Symplectic => SelfAdjoint::Complex(sample_quaternion(n, 0.25 * v, diag, &mut rng)),
    }
}

fn sample_quaternion<R: Rng>(n: usize, component: f64, diag: f64, rng: &mut R) -> Mat<c64> {
    let off = gaussian(component);
    let on = gaussian(diag);
    let mut m = Mat::<c64>::zeros(2 * n, 2 * n);
    for k in 0..n {
        let s = on.sample(rng);
        m[(2 * k, 2 * k)] = c64::new(s, 0.0);
        m[(2 * k + 1, 2 * k + 1)] = c64::new(s, 0.0);
        for l in 0..k {
            let s = off.sample(rng);
            let a1 = off.sample(rng);
            let a2 = off.sample(rng);
            let a3 = off.sample(rng);
            // Block (k, l) = s 1 + i (a1 sx + a2 sy + a3 sz).
            let block = [
                [c64::new(s, a3), c64::new(a2, a1)],
                [c64::new(-a2, a1), c64::new(s, -a3)],
            ];
            for (p, row) in block.iter().enumerate() {
                for (q, &z) in row.iter().enumerate() {
                    m[(2 * k + p, 2 * l + q)] = z;
                    m[(2 * l + q, 2 * k + p)] = z.conj();
                }
            }
        }
    }
    m
}

fn gaussian(variance: f64) -> Normal<f64> {
    Normal::new(0.0, variance.sqrt()).expect("variance is finite and non-negative")
}

/// An unperturbed draw, an independent perturbing draw, and their mixture
/// `H_phi = cos(phi) H0 + sin(phi) H1`.
#[derive(Debug, Clone)]
pub struct SampledPair {
    pub h0: SelfAdjoint,
    pub h1: SelfAdjoint,
    pub hphi: SelfAdjoint,
}

/// Samples `H0` from slot 0 and `H1` from slot `inner + 1` of the outer
/// realization's streams.
pub fn sample_pair(spec: &EnsembleSpec, phi: f64, seed: u64, outer: u64, inner: u64) -> Result<SampledPair> {
    let h0 = sample_matrix(spec, StreamKey::new(seed, outer, 0)?);
    let h1 = sample_matrix(spec, StreamKey::new(seed, outer, inner + 1)?);
    let hphi = mix(&h0, &h1, phi);
    Ok(SampledPair { h0, h1, hphi })
}

/// `cos(phi) h0 + sin(phi) h1`; returns `h0` unchanged when `phi = 0`.
pub fn mix(h0: &SelfAdjoint, h1: &SelfAdjoint, phi: f64) -> SelfAdjoint {
    if phi == 0.0 {
        return h0.clone();
    }
    h0.combine(phi.cos(), h1, phi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec(beta: Beta, n: usize) -> EnsembleSpec {
        EnsembleSpec::new(beta, n).unwrap()
    }

    #[test]
    fn zero_angle_returns_unperturbed() {
        let s = spec(Beta::Unitary, 8);
        let pair = sample_pair(&s, 0.0, 1, 0, 0).unwrap();
        let (SelfAdjoint::Complex(a), SelfAdjoint::Complex(b)) = (&pair.h0, &pair.hphi) else {
            panic!("GUE must be complex");
        };
        assert_eq!(a, b);
    }

    #[test]
    fn goe_off_diagonal_variance() {
        let n = 500;
        let s = spec(Beta::Orthogonal, n);
        let SelfAdjoint::Real(m) = sample_matrix(&s, StreamKey::new(11, 0, 0).unwrap()) else {
            panic!("GOE must be real");
        };
        let mut sum = 0.0;
        let mut count = 0usize;
        'outer: for i in 0..n {
            for j in 0..i {
                sum += m[(i, j)] * m[(i, j)];
                count += 1;
                if count == 10_000 {
                    break 'outer;
                }
            }
        }
        let var = sum / count as f64;
        let want = n as f64 / (PI * PI);
        assert!((var / want - 1.0).abs() < 0.05, "{var} vs {want}");
    }

    #[test]
    fn second_moments_match_for_every_ensemble() {
        let n = 120;
        for beta in Beta::ALL {
            let s = spec(beta, n);
            let h = sample_matrix(&s, StreamKey::new(5, 1, 0).unwrap());
            let (mut off, mut offc, mut diag) = (0.0, 0usize, 0.0);
            let block = if beta == Beta::Symplectic { 2 } else { 1 };
            for k in 0..n {
                for l in 0..=k {
                    // Quaternion modulus squared = half the Frobenius norm of
                    // its 2x2 block.
                    let mut m2 = 0.0;
                    for p in 0..block {
                        for q in 0..block {
                            let (i, j) = (block * k + p, block * l + q);
                            m2 += match &h {
                                SelfAdjoint::Real(m) => m[(i, j)].powi(2),
                                SelfAdjoint::Complex(m) => m[(i, j)].norm_sqr(),
                            };
                        }
                    }
                    m2 /= block as f64;
                    if k == l {
                        diag += m2;
                    } else {
                        off += m2;
                        offc += 1;
                    }
                }
            }
            let off = off / offc as f64;
            let diag = diag / n as f64;
            assert!((off / s.variance_matrix_element(false) - 1.0).abs() < 0.03, "{beta:?} off {off}");
            assert!((diag / s.variance_matrix_element(true) - 1.0).abs() < 0.25, "{beta:?} diag {diag}");
        }
    }

    #[test]
    fn symmetry_classes_are_preserved() {
        for beta in Beta::ALL {
            let s = spec(beta, 20);
            let pair = sample_pair(&s, 0.3, 9, 2, 4).unwrap();
            for h in [&pair.h0, &pair.h1, &pair.hphi] {
                assert_eq!(h.hermiticity_defect(), 0.0);
                if beta == Beta::Symplectic {
                    assert!(h.self_duality_defect().unwrap() <= 1e-15);
                    assert_eq!(h.size(), 40);
                }
            }
        }
    }

    #[test]
    fn draws_depend_only_on_stream_key() {
        let s = spec(Beta::Orthogonal, 10);
        let a = sample_pair(&s, 0.1, 3, 5, 7).unwrap();
        let b = sample_pair(&s, 0.1, 3, 5, 7).unwrap();
        let (SelfAdjoint::Real(x), SelfAdjoint::Real(y)) = (&a.hphi, &b.hphi) else {
            panic!()
        };
        assert_eq!(x, y);
        let c = sample_pair(&s, 0.1, 3, 5, 8).unwrap();
        let (SelfAdjoint::Real(x0), SelfAdjoint::Real(c0)) = (&a.h0, &c.h0) else {
            panic!()
        };
        assert_eq!(x0, c0);
    }
}
