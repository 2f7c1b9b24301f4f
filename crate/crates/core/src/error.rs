//! Error type shared by every module of the library.

/// Errors produced by the numerical routines and the harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the admissible range (p < 1, δ too large, x outside A_{rh}, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration is malformed or names something that does not exist.
    #[error("configuration error: {0}")]
    Config(String),

    /// The requested computation is not supported for this input.
    #[error("capability error: {0}")]
    Capability(String),

    /// An internal consistency check failed.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
