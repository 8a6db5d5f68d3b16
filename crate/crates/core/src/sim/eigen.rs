//! Dense self-adjoint eigendecomposition, backed by `faer`.

use faer::{c64, Mat, Side};

use crate::error::{FidelityError, Result};
use crate::sim::ensemble::SelfAdjoint;

/// Orthonormal eigenvectors stored column-wise.
#[derive(Debug, Clone)]
pub enum Eigenvectors {
    Real(Mat<f64>),
    Complex(Mat<c64>),
}

/// Ascending eigenvalues with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: Eigenvectors,
}

fn eigen_error(dim: usize, err: faer::linalg::evd::EvdError) -> FidelityError {
    FidelityError::Eigen {
        dim,
        reason: format!("{err:?} (QR iteration limit reached)"),
    }
}

pub fn diagonalize(h: &SelfAdjoint) -> Result<EigenSystem> {
    let n = h.size();
    match h {
        SelfAdjoint::Real(m) => {
            let evd = m.self_adjoint_eigen(Side::Lower).map_err(|e| eigen_error(n, e))?;
            let values = (0..n).map(|i| evd.S()[i]).collect();
            Ok(EigenSystem {
                values,
                vectors: Eigenvectors::Real(evd.U().to_owned()),
            })
        }
        SelfAdjoint::Complex(m) => {
            let evd = m.self_adjoint_eigen(Side::Lower).map_err(|e| eigen_error(n, e))?;
            let values = (0..n).map(|i| evd.S()[i].re).collect();
            Ok(EigenSystem {
                values,
                vectors: Eigenvectors::Complex(evd.U().to_owned()),
            })
        }
    }
}

/// Ascending eigenvalues without eigenvectors.
pub fn eigenvalues(h: &SelfAdjoint) -> Result<Vec<f64>> {
    let n = h.size();
    match h {
        SelfAdjoint::Real(m) => m.self_adjoint_eigenvalues(Side::Lower).map_err(|e| eigen_error(n, e)),
        SelfAdjoint::Complex(m) => m.self_adjoint_eigenvalues(Side::Lower).map_err(|e| eigen_error(n, e)),
    }
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `max_k |H v_k - lambda_k v_k|`.
    pub fn max_residual(&self, h: &SelfAdjoint) -> f64 {
        match (h, &self.vectors) {
            (SelfAdjoint::Real(m), Eigenvectors::Real(v)) => {
                let hv = m * v;
                (0..self.dim())
                    .map(|k| {
                        (0..self.dim())
                            .map(|i| (hv[(i, k)] - self.values[k] * v[(i, k)]).powi(2))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .fold(0.0, f64::max)
            }
            (SelfAdjoint::Complex(m), Eigenvectors::Complex(v)) => {
                let hv = m * v;
                (0..self.dim())
                    .map(|k| {
                        (0..self.dim())
                            .map(|i| (hv[(i, k)] - v[(i, k)] * self.values[k]).norm_sqr())
                            .sum::<f64>()
                            .sqrt()
                    })
                    .fold(0.0, f64::max)
            }
            _ => f64::INFINITY,
        }
    }

    /// `max |(R^dagger R - 1)_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.dim();
        match &self.vectors {
            Eigenvectors::Real(v) => {
                let g = v.transpose() * v;
                max_identity_defect(n, |i, j| g[(i, j)].abs(), |i| (g[(i, i)] - 1.0).abs())
            }
            Eigenvectors::Complex(v) => {
                let g = v.adjoint() * v;
                max_identity_defect(n, |i, j| g[(i, j)].norm(), |i| (g[(i, i)] - 1.0).norm())
            }
        }
    }

    /// `|(R_phi^dagger R_0)_{k l}|^2` for all `k` and the given `l` columns,
    /// as a row-major `dim x band.len()` table.
    pub fn overlap_weights(&self, reference: &EigenSystem, band: std::ops::Range<usize>) -> Vec<f64> {
        let n = self.dim();
        let width = band.len();
        let mut out = vec![0.0; n * width];
        match (&self.vectors, &reference.vectors) {
            (Eigenvectors::Real(a), Eigenvectors::Real(b)) => {
                let r = a.transpose() * b.subcols(band.start, width);
                for k in 0..n {
                    for l in 0..width {
                        out[k * width + l] = r[(k, l)] * r[(k, l)];
                    }
                }
            }
            (Eigenvectors::Complex(a), Eigenvectors::Complex(b)) => {
                let r = a.adjoint() * b.subcols(band.start, width);
                for k in 0..n {
                    for l in 0..width {
                        out[k * width + l] = r[(k, l)].norm_sqr();
                    }
                }
            }
            _ => panic!("eigenvector representations differ"),
        }
        out
    }
}

fn max_identity_defect(n: usize, off: impl Fn(usize, usize) -> f64, on: impl Fn(usize) -> f64) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max(if i == j { on(i) } else { off(i, j) });
        }
    }
    worst
}
