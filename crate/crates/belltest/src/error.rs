use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical or statistical parameter is outside its allowed range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Configuration file could not be parsed.
    #[error("config error (line {line}): {msg}")]
    Config { line: usize, msg: String },

    /// A required configuration key is missing.
    #[error("missing config key `{0}`")]
    MissingKey(String),

    /// A count-based estimate is undefined (e.g. no trials for a setting pair).
    #[error("undefined estimate: {0}")]
    UndefinedEstimate(String),

    /// An adversary description does not satisfy the locality structure.
    #[error("invalid adversary strategy: {0}")]
    InvalidStrategy(String),

    /// A record, trace, or event file is malformed.
    #[error("decode error: {0}")]
    Decode(String),

    /// Input that must be time-sorted is not.
    #[error("unsorted input: {0}")]
    Unsorted(String),

    /// A spacetime configuration is missing a required event.
    #[error("missing spacetime event `{0}`")]
    MissingEvent(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn decode(msg: impl Into<String>) -> Self {
        Error::Decode(msg.into())
    }
}
