use thiserror::Error;

/// Errors produced by the game engine, samplers and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate matrix: {0}")]
    DegenerateMatrix(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("truncation region has probability {0:e}, below 1e-12")]
    DegenerateTruncation(f64),
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
