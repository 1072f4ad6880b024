use thiserror::Error;

/// Errors raised by model construction, design validation and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A numeric argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value is invalid. `key` names the offending field.
    #[error("invalid `{key}`: {message}")]
    Config { key: String, message: String },

    /// An arm has too few observations for the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
