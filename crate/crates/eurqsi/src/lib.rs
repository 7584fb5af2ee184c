//! Scenario files, reports and the `eurqsi` command line on top of `eurqsi-core`.
//!
//! Exit codes: 0 pass, 1 tolerance failure, 2 parse error, 3 invalid input.

use std::fmt;
use std::process::ExitCode;

pub mod cli;
pub mod output;
pub mod report;
pub mod scenario;

#[derive(Clone, Debug, PartialEq)]
pub enum CliError {
    /// Unreadable input: bad JSON, malformed flag values, missing files.
    Parse(String),
    /// Well-formed input that violates an invariant.
    Validation(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<eurqsi_core::Error> for CliError {
    fn from(e: eurqsi_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// What a finished command produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    pub body: String,
    /// Base name for the output file, without extension.
    pub stem: String,
}

impl Outcome {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(if self.pass { 0 } else { 1 })
    }
}
