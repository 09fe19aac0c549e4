use thiserror::Error;

/// Errors raised by the exact and numerical checks.
///
/// Verdicts (a relation failing, a hypothesis not holding) are not errors;
/// they are reported as data. These variants cover inputs an operation
/// cannot work with at all.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("not admissible: {0}")]
    NotAdmissible(String),
    #[error("not a similarity: {0}")]
    NotSimilarity(String),
    #[error("no strict similarity: every ratio equals 1")]
    NoStrictSimilarity,
    #[error("not found: {0}")]
    NotFound(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unsupported composition: {0}")]
    UnsupportedComposition(String),
    #[error("truncation unsound: {0}")]
    TruncationUnsound(String),
    #[error("not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
