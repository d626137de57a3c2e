use thiserror::Error;

/// Errors raised across the crate.
///
/// `InvalidInput` and `Validation` describe bad data handed in by a caller;
/// `Degenerate` and `Precondition` describe numerical situations where an
/// operation is undefined for otherwise well-formed data.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("validation failed for {what}: residual {residual:.3e}")]
    Validation { what: String, residual: f64 },

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn validation(what: impl Into<String>, residual: f64) -> Self {
        Error::Validation {
            what: what.into(),
            residual,
        }
    }

    /// True for errors caused by malformed or inconsistent input data.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::Validation { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
