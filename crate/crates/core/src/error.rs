use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("basis dimension {dim} exceeds the index range ({limit})")]
    Size { dim: u128, limit: u128 },

    #[error("state outside the truncated basis: {0}")]
    Domain(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },

    #[error("eigensolver did not converge after {iterations} matvecs (best residual {best_residual:.3e}, tol {tol:.3e})")]
    NotConverged {
        iterations: usize,
        best_residual: f64,
        tol: f64,
    },

    #[error("{failed} of {total} disorder realizations failed (more than 1%)")]
    EnsembleFailures { failed: usize, total: usize },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
