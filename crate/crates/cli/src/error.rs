use std::io;
use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Model(#[from] gupqm::Error),

    #[error("cannot read {path}: {source}")]
    Read { path: String, source: io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: String, source: io::Error },

    #[error("at {point}: {source}")]
    AtPoint { point: String, source: Box<CliError> },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    /// 1 for numerical failures, 2 for anything the caller can fix.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Model(gupqm::Error::NonConvergent(_)) => ExitCode::from(1),
            CliError::AtPoint { source, .. } => source.exit_code(),
            _ => ExitCode::from(2),
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
