//! Driver behind the `dctm` binary: configuration parsing and the
//! `synthesize`, `sweep`, `count`, `pattern` and `metrics` commands.

pub mod commands;
pub mod config;

use thiserror::Error;

pub use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] dctm_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Process exit status: 3 for an infeasible partition, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(dctm_core::Error::Infeasible { .. }) => 3,
            _ => 1,
        }
    }
}
