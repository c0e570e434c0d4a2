use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or config: exit code 2.
    #[error("{0}")]
    Usage(String),
    /// A model operation failed: exit code 1.
    #[error(transparent)]
    Model(#[from] tumordde_core::Error),
    #[error("{0}")]
    Domain(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            _ => ExitCode::from(1),
        }
    }
}
