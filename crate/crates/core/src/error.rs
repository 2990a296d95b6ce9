use thiserror::Error;

/// Errors raised by the synthesis, design and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("unsupported size {size}: {reason}")]
    UnsupportedSize { size: usize, reason: &'static str },

    #[error("config error for key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
