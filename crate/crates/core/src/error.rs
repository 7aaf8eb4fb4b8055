use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one CLI exit class.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix or vector dimensions do not agree, or an entry is not finite.
    #[error("shape error: {0}")]
    Shape(String),

    /// A hypothesis (unit norm, |f_j(tau_j)| >= 1) is violated at a specific index.
    #[error("hypothesis violated at index {index}: {reason}")]
    Hypothesis { index: usize, reason: String },

    /// Input is degenerate for the requested quantity (zero signal, zero mass, zero coherence).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no admissible signal: the fixed-point space is trivial")]
    NoAdmissibleSignal,

    #[error("search guard exceeded: n + m = {requested} > {guard}")]
    GuardExceeded { requested: usize, guard: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
