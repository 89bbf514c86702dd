//! Error type shared across the crate.

use thiserror::Error;

/// Unified error for instance generation, simulation, and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bitstring length {got} does not match expected length {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{what} supports n <= {cap}, got n = {n}")]
    CapExceeded {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("requested {requested} constraints but only {available} distinct triples exist at n = {n}")]
    TooManyConstraints {
        requested: u64,
        available: u64,
        n: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("target set is empty")]
    EmptyTargets,

    #[error("need at least two positive-probability points to fit, got {got} ({excluded} zero points excluded)")]
    InsufficientFitPoints { got: usize, excluded: usize },

    #[error("cannot compose fits taken at different distances: d = {d} vs r = {r}")]
    MismatchedComposition { d: f64, r: f64 },

    #[error("fit grid is empty")]
    EmptyGrid,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for I/O and (de)serialization failures, as opposed to parameter
    /// validation and cap violations. The CLI maps the two classes to
    /// different exit codes.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Json(_) | Error::Csv(_))
    }
}
