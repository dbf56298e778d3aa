//! Library side of the `factscreen` binary: dataset I/O and the
//! `analyze`, `simulate` and `generate` commands.

pub mod commands;
pub mod dataset;

use std::fmt;

pub use commands::{run_analyze, run_generate, run_simulate, AnalyzeArgs, GenerateArgs, OutputFormat, SimulateArgs};
pub use dataset::{parse_dataset, write_dataset};

/// Failure classes, each mapped to a process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Malformed input, configuration or flags.
    Input(String),
    /// Arms missing or with too few units for the requested inference.
    Replication(String),
    /// Output failures and anything unexpected.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Replication(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Replication(m) => write!(f, "insufficient replication: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<factscreen_core::Error> for CliError {
    fn from(e: factscreen_core::Error) -> Self {
        if e.is_replication() {
            CliError::Replication(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
