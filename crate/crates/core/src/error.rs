use thiserror::Error;

/// Errors produced by the fidelity toolkit.
#[derive(Debug, Error)]
pub enum FidelityError {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature integrand returned NaN or infinity.
    #[error("integrand is not finite at x = {abscissa} (value {value})")]
    NonFinite { abscissa: f64, value: f64 },

    /// `b2` was evaluated exactly on the GSE logarithmic singularity.
    #[error("GSE form factor is singular at t = 1")]
    SingularPoint,

    /// The eigensolver did not converge.
    #[error("eigensolver failed for a {dim}x{dim} matrix: {reason}")]
    Eigen { dim: usize, reason: String },

    /// Inconsistent or incomplete configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, FidelityError>;
