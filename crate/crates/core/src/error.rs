use thiserror::Error;

/// Errors raised by the estimators, kernels and simulation harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("family `{family}` is not supported here: {reason}")]
    UnsupportedFamily { family: String, reason: String },

    #[error("invalid null specification: {0}")]
    InvalidNull(String),

    #[error("integrand is not finite at node {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("no observations supplied")]
    EmptyInput,

    #[error("observation {index} is not finite ({value})")]
    NonFiniteObservation { index: usize, value: f64 },

    #[error("number of hypotheses must be at least 2, got {0}")]
    InvalidM(usize),

    #[error("the MR estimator needs more than 4 p-values, got {0}")]
    TooFewPValues(usize),

    #[error("lambda must lie in (0, 1), got {0}")]
    InvalidLambda(f64),

    #[error("p-value {index} is outside [0, 1] ({value})")]
    InvalidPValue { index: usize, value: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;
