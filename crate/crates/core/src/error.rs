use thiserror::Error;

/// Errors raised by factorization routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NmfError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("rank error: {0}")]
    Rank(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, NmfError>;
