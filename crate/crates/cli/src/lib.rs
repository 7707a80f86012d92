//! Command-line front end for the simulation library.
//!
//! Everything user-facing lives here: the config format, the three
//! commands, and the CSV/JSON artifact writers. The library exists so the
//! commands can be driven in-process by tests; the binary is a thin
//! dispatcher on top.

use std::fmt;

pub mod commands;
pub mod config;
pub mod output;

/// A command failure, split by exit code: config and usage problems exit
/// with 2, aborted runs and failed verification with 1.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) | CliError::Run(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}
