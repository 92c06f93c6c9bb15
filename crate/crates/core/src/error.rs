use thiserror::Error;

/// Errors raised by the geometric operations and the scenario layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Operands do not live in the same space (dimension, variance or chart mismatch).
    #[error("structural mismatch: {0}")]
    Structural(String),

    /// An argument is outside its admissible range.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A checked precondition of the operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Malformed text input.
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    /// Well-formed input that references undefined objects or has inconsistent degrees.
    #[error("semantic error: {0}")]
    Semantic(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn structural(msg: impl Into<String>) -> Error {
    Error::Structural(msg.into())
}

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
