//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument is outside its physical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A constructed value would violate a model invariant.
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// A scenario or estimator configuration cannot be run as requested.
    #[error("configuration error: {0}")]
    Config(String),

    /// The requested combination is deliberately not modeled.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A frequency band falls outside the span of an estimate.
    #[error("range error: {0}")]
    Range(String),

    /// The beatnote cannot be separated from the noise floor at the
    /// requested averaging.
    #[error(
        "beatnote not resolvable above the noise floor; \
         approximately {required_averages} averages would be needed"
    )]
    ToneNotResolvable { required_averages: usize },

    /// A scenario document failed to parse; names the offending key.
    #[error("scenario parse error at key `{key}`: {reason}")]
    Parse { key: String, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn parse(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
