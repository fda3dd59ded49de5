use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("numerical failure in {context}: {reason}")]
    NumericalFailure { context: &'static str, reason: String },

    #[error("non-finite state on path {path} at step {step}")]
    NonFiniteState { path: usize, step: usize },

    #[error("{escaped:.3e} of the mass left the truncated domain (limit {limit:.1e}); widen the grid")]
    DomainTooSmall { escaped: f64, limit: f64 },

    #[error("mass mismatch: {0:.3e}")]
    MassMismatch(f64),

    #[error("density became negative ({min:.3e}) at step {step}")]
    Negativity { min: f64, step: usize },

    #[error("Newton iteration did not converge at step {step} after {iterations} iterations (last change {change:.3e})")]
    NewtonDiverged { step: usize, iterations: usize, change: f64 },

    #[error("malformed file: {0}")]
    Format(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn numerical(context: &'static str, reason: impl Into<String>) -> Self {
        Error::NumericalFailure { context, reason: reason.into() }
    }
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::ShapeMismatch { expected, actual })
    }
}
