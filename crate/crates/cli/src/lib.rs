//! Verification runner: claim registry, check runners and report output.

pub mod checks;
pub mod commands;
pub mod registry;
pub mod report;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("registry: {0}")]
    Registry(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> u8 {
        2
    }
}
