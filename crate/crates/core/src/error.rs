use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PencilError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not {expected}: smallest eigenvalue {min_eigenvalue:e} (threshold {threshold:e})")]
    Definiteness {
        expected: &'static str,
        min_eigenvalue: f64,
        threshold: f64,
    },

    #[error("computation failed: {0}")]
    Computation(String),

    #[error("no convergence after {iterations} iterations, bracket ({lower}, {upper}]")]
    NoConvergence {
        iterations: usize,
        lower: f64,
        upper: f64,
    },
}

pub type Result<T> = std::result::Result<T, PencilError>;
