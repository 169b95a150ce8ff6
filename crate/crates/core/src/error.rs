use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while validating or loading configuration.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid protocol parameters: {0}")]
    Protocol(String),
    #[error("invalid adversary configuration: {0}")]
    Adversary(String),
    #[error("invalid run configuration: {0}")]
    Run(String),
    #[error("invalid sweep specification: {0}")]
    Sweep(String),
    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

/// Top-level error type for file-producing operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
