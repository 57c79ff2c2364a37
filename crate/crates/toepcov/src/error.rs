//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by estimators, models and the experiment harness.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter violated a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A lag or bandwidth exceeded the admissible range.
    #[error("{what} = {value} out of range [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    /// A kernel failed the taper validity checks.
    #[error("invalid taper `{name}`: {reason}")]
    InvalidTaper { name: String, reason: String },

    /// A true autocovariance sequence was too short for the requested
    /// computation and carried no usable tail bound.
    #[error(
        "autocovariance horizon too short: have lags up to {have}, need {need} \
         (tail beyond the horizon not bounded below 1e-10)"
    )]
    InsufficientHorizon { have: usize, need: usize },

    /// Iterative eigenvalue computation did not reach the requested residual.
    #[error(
        "eigenvalue iteration did not converge after {iterations} iterations: \
         best estimate {best:.6e}, residual {residual:.3e} > tolerance {tolerance:.3e}"
    )]
    NoConvergence {
        iterations: usize,
        best: f64,
        residual: f64,
        tolerance: f64,
    },

    /// A model preset string could not be parsed.
    #[error("cannot parse model preset `{0}`")]
    BadPreset(String),

    /// A Monte Carlo replicate failed; carries the replicate index.
    #[error("replicate {index}: {source}")]
    Replicate {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
