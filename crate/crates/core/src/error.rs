use thiserror::Error;

/// Errors raised by the limit, kernel and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural argument (term count, grid size, ...) is invalid.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The function is singular at the requested point.
    #[error("singularity: {0}")]
    Singularity(String),

    /// An iterative numerical method did not reach its tolerance.
    /// `estimate` and `error_estimate` carry the best partial answer.
    #[error("numerical failure: {message} (estimate {estimate:e}, error estimate {error_estimate:e})")]
    Numerical {
        message: String,
        estimate: f64,
        error_estimate: f64,
    },

    /// Inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
