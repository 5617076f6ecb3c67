//! Batch front end: ingest point clouds, run the reduction and fitting
//! pipelines, and emit JSON or CSV reports.

pub mod bench;
pub mod config;
pub mod ingest;
pub mod report;
pub mod run;
pub mod selftest;

pub use config::{Cli, Mode, OutputFormat, RunConfig};
pub use run::{run, Outcome};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("computation failed: {0}")]
    Compute(#[from] sspn_core::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    /// Process exit status for this failure category.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Input(_) | CliError::Output(_) => exit::IO,
            CliError::Compute(_) => exit::COMPUTE,
        }
    }
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const IO: i32 = 3;
    pub const COMPUTE: i32 = 4;
    pub const SELFTEST: i32 = 5;
}
