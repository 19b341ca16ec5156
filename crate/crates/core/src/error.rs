use thiserror::Error;

/// Errors raised by the series, bounds, factorization and mechanism routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input: horizon must be at least 1")]
    EmptyInput,
    #[error("symbol is not normalized: leading coefficient is {0}, expected 1")]
    NotNormalized(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{what} = {value} exceeds the supported maximum {max}")]
    Range {
        what: &'static str,
        value: usize,
        max: usize,
    },
    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("stream exhausted after {0} steps")]
    StreamExhausted(usize),
    #[error("non-finite stream value at step {0}")]
    NonFiniteInput(usize),
    #[error("invalid privacy parameters: {0}")]
    Privacy(String),
    #[error("unsupported decay function for this operation: {0}")]
    UnsupportedDecay(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
