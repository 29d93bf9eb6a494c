//! Errors of the command-line front end and their exit codes.

use crate::format::FormatError;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const INFEASIBLE: u8 = 2;
    pub const INVALID: u8 = 3;
    pub const BUDGET: u8 = 4;
    pub const MISMATCH: u8 = 5;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Format(#[from] FormatError),
    #[error("{0}")]
    Core(#[from] bilevel_core::Error),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    /// An algorithm disagreed with its oracle; carries the offending
    /// instance file.
    #[error("oracle mismatch: {detail}")]
    Mismatch { detail: String, counterexample: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use bilevel_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io { .. } => exit::USAGE,
            CliError::Format(_) => exit::INVALID,
            CliError::Core(E::Infeasible(_) | E::InfeasibleLeader { .. }) => exit::INFEASIBLE,
            CliError::Core(E::BudgetExceeded { .. }) => exit::BUDGET,
            CliError::Core(_) => exit::INVALID,
            CliError::Mismatch { .. } => exit::MISMATCH,
        }
    }
}
