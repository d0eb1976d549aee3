use std::path::PathBuf;

/// Errors raised by mesh construction, assembly, solvers and scenario handling.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("linear solve failed ({context}): relative residual {residual:e}")]
    Solver { context: String, residual: f64 },

    #[error("factorisation failed ({context}): {reason}")]
    Factorisation { context: String, reason: String },

    #[error("non-finite values at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },

    #[error("history mismatch: {0}")]
    History(String),

    #[error("config error in field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("parse error in {path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
