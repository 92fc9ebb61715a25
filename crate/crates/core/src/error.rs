use thiserror::Error;

/// Errors raised by state construction, measures, the roof oracle and the checkers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("matrix is not Hermitian (max entry deviation {0:e})")]
    NotHermitian(f64),

    #[error("eigenvalue {0:e} below the clamp window; not a density matrix")]
    NegativeEigenvalue(f64),

    #[error("{algorithm} did not converge after {sweeps} sweeps")]
    NoConvergence { algorithm: &'static str, sweeps: usize },

    #[error("numeric cross-check failed: {0}")]
    NumericMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("input exceeds budget: {0}")]
    BudgetExceeded(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    /// True for failures of the numerical machinery itself rather than bad input.
    pub fn is_numeric_failure(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::NumericMismatch(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
