//! Config ingestion, subcommand dispatch and report emission for the
//! `nlse-gauge` binary.

pub mod commands;
pub mod config;
pub mod reports;

use std::process::ExitCode;

use thiserror::Error;

use nlse_gauge::dynamics::DynError;
use nlse_gauge::gauge_algebra::AlgebraError;
use nlse_gauge::time_fn::TimeFnError;
use nlse_gauge::wavefield::WaveError;

pub use commands::{dispatch, Command, VerifyScenario};
pub use config::{Overrides, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad config, bad input file, or a request the library rejects.
    #[error("config error: {0}")]
    Config(String),
    /// The run itself failed: divergence, undefined phase branch, or a
    /// verification tolerance that was not met.
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<TimeFnError> for CliError {
    fn from(e: TimeFnError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<WaveError> for CliError {
    fn from(e: WaveError) -> Self {
        match e {
            WaveError::PhaseBranch { .. } | WaveError::NumericalDomain(_) => CliError::Numerical(e.to_string()),
            WaveError::Io(io) => CliError::Io(io),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<DynError> for CliError {
    fn from(e: DynError) -> Self {
        match e {
            DynError::Wave(w) => w.into(),
            DynError::Io(io) => CliError::Io(io),
            e if e.is_numerical() => CliError::Numerical(e.to_string()),
            e => CliError::Config(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
