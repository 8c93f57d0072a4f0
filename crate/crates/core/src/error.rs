//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the library. Every variant carries a human-readable
/// explanation naming the offending quantity.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Shapes or ambient dimensions of the operands do not agree.
    #[error("dimension error: {0}")]
    Dimension(String),
    /// The input is well formed but outside the supported scope.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An operation requiring a non-critical module received a critical one.
    #[error("non-critical module required: {0}")]
    NoncriticalRequired(String),
    /// The input violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A serialized value could not be decoded.
    #[error("parse error in `{field}`: {message}")]
    Parse { field: String, message: String },
    /// The module fails weak admissibility while admissibility was required.
    #[error("not weakly admissible: {0}")]
    NotAdmissible(String),
    /// An internal consistency check of a constructed model failed.
    #[error("model invariant violated: {0}")]
    ModelInvariant(String),
}

/// Library result alias.
pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}
