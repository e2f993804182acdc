use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("eigenvalue iteration did not converge after {iterations} iterations ({found} of {n} eigenvalues found)")]
    NoConvergence {
        iterations: usize,
        found: usize,
        n: usize,
        partial: Vec<Complex64>,
    },

    #[error("invalid parameter: {0}")]
    Validation(String),

    #[error("mode mismatch: {0}")]
    Mode(String),

    #[error("ill-posed conic program: {0}")]
    IllPosed(String),

    #[error("certificate is invalid: {0}")]
    InvalidCertificate(String),

    #[error("projection failed: {0}")]
    Projection(String),

    #[error("postcondition violated: {0}")]
    Postcondition(String),
}
