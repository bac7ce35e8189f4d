use thiserror::Error;

/// Errors raised by the numerical routines and the run layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite input {name} = {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("{name} = {value} outside domain: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("length mismatch for {what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid atom system: {0}")]
    InvalidSystem(String),

    #[error("invalid product space: {0}")]
    InvalidSpace(String),

    #[error("reduced form precondition fails at row {row}: {reason}")]
    ReducedPrecondition { row: usize, reason: String },

    #[error("multiplier bisection did not converge for row {row} after {iterations} iterations")]
    BisectionFailed { row: usize, iterations: usize },

    #[error("enumeration of {count} points exceeds guard {limit}")]
    EnumerationGuard { count: u128, limit: u128 },

    #[error("critical constant bracket invalid: {0}")]
    Bracket(String),

    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { name, value })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
