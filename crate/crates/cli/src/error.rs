use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("config key `{key}`: {message}")]
    Invalid { key: String, message: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Model(#[from] imposter::Error),

    #[error("cannot read {0}: {1}")]
    Input(PathBuf, std::io::Error),

    #[error("cannot write {0}: {1}")]
    Output(PathBuf, std::io::Error),

    #[error("{path}: {message}")]
    Table { path: PathBuf, message: String },

    #[error("{0}")]
    Gate(String),
}

impl CliError {
    pub fn invalid(key: &str, message: String) -> Self {
        Self::Invalid {
            key: key.to_string(),
            message,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Model(e) if e.is_numerical() => 3,
            CliError::Gate(_) => 4,
            CliError::Output(..) => 1,
            _ => 2,
        })
    }
}
