use thiserror::Error;

/// Errors raised by the estimation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index set does not contain lag {lag} required by the filter")]
    InvalidSupport { lag: String },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value {value} at grid point {index}")]
    Integration { index: usize, value: f64 },

    #[error("invalid spectrum: value {value} < 0 at grid point {index}")]
    InvalidSpectrum { index: usize, value: f64 },

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("{which} is not strictly positive on the grid (value {value} at point {index})")]
    Boundary {
        which: &'static str,
        index: usize,
        value: f64,
    },

    #[error("{which} is negative on the grid (value {value} at point {index})")]
    Domain {
        which: &'static str,
        index: usize,
        value: f64,
    },

    #[error("Newton system is numerically singular (condition estimate {condition_estimate:e})")]
    Conditioning { condition_estimate: f64 },

    #[error("line search failed at iteration {iteration}: step {step:e} below minimum")]
    LineSearch { iteration: usize, step: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("solve failed at lambda = {lambda:e}: {source}")]
    AtLambda {
        lambda: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
