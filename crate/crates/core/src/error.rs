use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or unsupported group spec.
    #[error("invalid spec: {0}")]
    Spec(String),
    /// Caller supplied arguments outside an operation's domain.
    #[error("usage: {0}")]
    Usage(String),
    /// A search exceeded its node or radius budget.
    #[error("resource budget exceeded: {0}")]
    Resource(String),
    /// A scheduler stage or a verification suite did not meet its conditions.
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
