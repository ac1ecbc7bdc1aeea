use std::path::PathBuf;

use thiserror::Error;

/// Every variant maps to exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(gvqkd_core::Error),
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// The configuration key at fault, if any.
    pub fn key(&self) -> Option<&str> {
        match self {
            CliError::Config { key, .. } => Some(key),
            CliError::Core(gvqkd_core::Error::InvalidParameter { name, .. }) => Some(name),
            _ => None,
        }
    }
}

impl From<gvqkd_core::Error> for CliError {
    fn from(err: gvqkd_core::Error) -> Self {
        match err {
            gvqkd_core::Error::InvalidParameter { name, reason } => CliError::config(name, reason),
            other => CliError::Core(other),
        }
    }
}
