//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input (dimension mismatch, bad parameter
    /// range, unreadable file contents).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Too few observations for the requested estimator.
    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// A column has zero median absolute deviation, so the rank-based pilot
    /// cannot form a scale estimate for it.
    #[error("degenerate scale in column {column}: zero median absolute deviation")]
    DegenerateScale { column: usize },

    /// An iterative numeric routine failed to converge. Treated as a bug
    /// signal for routines that are provably convergent.
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// The operation requires a positive definite matrix.
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    /// Every cross-validation split failed.
    #[error("cross-validation failure: {0}")]
    CvFailure(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// CSV parsing problem; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
