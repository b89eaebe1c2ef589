use thiserror::Error;

/// Errors raised by the matrix, mean and checker layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("eigensolver did not converge on a {dim}x{dim} matrix")]
    ConvergenceFailure { dim: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("condition number {cond:.3e} exceeds the limit {limit:.1e}")]
    Conditioning { cond: f64, limit: f64 },

    #[error("matrix is not positive definite: smallest eigenvalue {min_eig:.3e} <= {threshold:.3e}")]
    NotPositiveDefinite { min_eig: f64, threshold: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eig:.3e}")]
    NotPositiveSemidefinite { min_eig: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("size guard: {0}")]
    Size(String),

    #[error("mean specification error: {0}")]
    Spec(String),

    #[error("function catalog error: {0}")]
    Catalog(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("parameter out of range: {0}")]
    Range(String),

    #[error("invalid campaign: {0}")]
    Campaign(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
