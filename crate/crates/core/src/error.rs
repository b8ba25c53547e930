use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input matrix is not Hermitian within the admissible tolerance.
    #[error("matrix is not Hermitian: max |Z_ij - conj(Z_ji)| = {max_asymmetry:e} at ({row}, {col})")]
    NotHermitian {
        max_asymmetry: f64,
        row: usize,
        col: usize,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Request exceeds a supported size; the message names the alternative path.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid design at record {index}: {reason}")]
    InvalidDesign { index: usize, reason: String },

    #[error("power iteration did not converge after {iterations} iterations (relative change {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("hypothesis violated: {quantity} = {value:e} exceeds {limit:e}")]
    HypothesisViolated {
        quantity: String,
        value: f64,
        limit: f64,
    },

    #[error("cone sampler rejected {tries} consecutive draws")]
    RejectionBudget { tries: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
