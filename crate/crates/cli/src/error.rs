use std::path::Path;

use thiserror::Error;

/// Command failures, grouped into exit-code categories.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0} already exists; pass --force to overwrite")]
    Exists(String),
    #[error("malformed file {path}: {msg}")]
    Format { path: String, msg: String },
    #[error("{0}")]
    Invalid(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Process exit code. 2 is left to argument parsing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Exists(_) => 5,
            CliError::Format { .. } => 6,
            CliError::Invalid(_) => 7,
        }
    }

    /// Attaches a file to core errors raised while reading it.
    pub fn reading(path: &Path, e: echo_mitigation::Error) -> Self {
        match e {
            echo_mitigation::Error::Io(source) => CliError::io(path, source),
            other => CliError::Format {
                path: path.display().to_string(),
                msg: other.to_string(),
            },
        }
    }
}

impl From<echo_mitigation::Error> for CliError {
    fn from(e: echo_mitigation::Error) -> Self {
        match e {
            echo_mitigation::Error::Io(source) => CliError::Io {
                path: String::new(),
                source,
            },
            echo_mitigation::Error::Format(msg) => CliError::Format {
                path: String::new(),
                msg,
            },
            other => CliError::Invalid(other.to_string()),
        }
    }
}
