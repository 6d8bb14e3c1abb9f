use std::io;

use thiserror::Error;

/// Errors raised by the laboratory's operations.
#[derive(Debug, Error)]
pub enum Error {
    /// A table was requested beyond its configured size ceiling, or below its minimum.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// A query reached past the range covered by a precomputed table.
    #[error("range error: {0}")]
    Range(String),

    /// Neither the smallest-prime-factor table nor the sieve covers a factorization.
    #[error("coverage error: {0}")]
    Coverage(String),

    /// Malformed or out-of-domain argument.
    #[error("argument error: {0}")]
    Argument(String),

    /// A linear-form system with vanishing `E`.
    #[error("degenerate system: {0}")]
    Degenerate(String),

    /// A formula evaluated outside the domain where it is meaningful.
    #[error("domain error: {0}")]
    Domain(String),

    /// An enumeration would exceed its work budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// Numerical resolution too coarse for the requested accuracy.
    #[error("precision error: {0}")]
    Precision(String),

    /// A root finder could not bracket or converge.
    #[error("solver error: {0}")]
    Solver(String),

    /// A persisted sieve file did not parse.
    #[error("bad sieve file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
