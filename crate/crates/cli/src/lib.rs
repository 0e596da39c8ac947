//! Experiment harness, file formats, and reports for the Robinson gauge.
//!
//! The algorithmic kernels live in the `robinson-gauge` crate; this crate
//! carries everything that touches the outside world: text matrix and
//! graph files, flat key-value experiment configs, deterministic CSV/JSON
//! emission, the decay / approximation / recognition experiments, and a
//! minimal SVG plotter.

use std::fmt;

pub mod config;
pub mod experiments;
pub mod io;
pub mod report;
pub mod stats;
pub mod svg;

/// Process exit codes used by the binary.
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or command-line usage (exit code 2).
    Config(String),
    /// A core routine refused an over-budget exhaustive request (exit 3).
    Budget(String),
    /// Malformed input file.
    Format(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        CliError::Format(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Format(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Budget(m) => write!(f, "budget error: {m}"),
            CliError::Format(m) => write!(f, "format error: {m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<robinson_gauge::Error> for CliError {
    fn from(e: robinson_gauge::Error) -> Self {
        match e {
            robinson_gauge::Error::Budget { .. } => CliError::Budget(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}
