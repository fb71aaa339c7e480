//! Experiment harness for `fqprod-core`: the `fqprod` command line, sweep
//! configs, the JSON-lines result cache and the acceptance runner.

pub mod cache;
pub mod cli;
pub mod commands;
pub mod config;
pub mod verify;

use thiserror::Error;

/// How a command failed; maps onto the process exit code.
#[derive(Debug, Error)]
pub enum Failure {
    /// Exit code 1.
    #[error("assertion failed: {0}")]
    Assertion(String),
    /// Exit code 2.
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Assertion(_) => 1,
            Failure::Config(_) => 2,
        }
    }
}

pub(crate) fn config_err<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Config(e.to_string())
}
