//! Batch pipelines over the submodular toolkit: dataset ingestion, kernel
//! construction, and the subcommand implementations behind the `submod`
//! binary. Every run emits one JSON report on stdout; logs go to stderr.

#![allow(clippy::needless_range_loop)]

pub mod commands;
pub mod dataset;
pub mod kernel;
pub mod report;

use submod::SubmodError;

/// Exit codes fixed by the interface contract: 0 success, 1 input error,
/// 2 infeasible constraints, 64 usage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    Input = 1,
    Infeasible = 2,
    Usage = 64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Toolkit(#[from] SubmodError),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::Usage,
            CliError::Toolkit(SubmodError::Infeasible(_)) => ExitCode::Infeasible,
            CliError::Toolkit(_) | CliError::Input(_) => ExitCode::Input,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
