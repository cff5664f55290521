//! Experiment plumbing: TOML configs and presets, deterministic runs, CSV
//! traces with a JSON sidecar, and the property suites behind `efm verify`.
//!
//! Exit codes: 0 success, 1 property failure, 2 configuration or I/O error,
//! 3 numerical failure.

mod config;
mod csv;
mod experiment;
mod suites;

pub use self::config::{CSetting, ConfigFile, ExperimentConfig, Family, InitSpec, PolarChoice, PRESETS};
pub use self::csv::{read_csv, write_csv, CsvRecord, CSV_HEADER};
pub use self::experiment::{bound_column, initial_matrix, run_and_write, run_experiment, RunOutput};
pub use self::suites::{run_suite, Check, Suite, SuiteOptions, SuiteReport};

use thiserror::Error;

use crate::counterexample::CexError;
use crate::optim::OptimError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Property(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Property(_) => 1,
            HarnessError::Config(_) | HarnessError::Io(_) => 2,
            HarnessError::Numerical(_) => 3,
        }
    }
}

impl From<OptimError> for HarnessError {
    fn from(e: OptimError) -> Self {
        if e.is_numerical() {
            HarnessError::Numerical(e.to_string())
        } else {
            HarnessError::Config(e.to_string())
        }
    }
}

impl From<CexError> for HarnessError {
    fn from(e: CexError) -> Self {
        match e {
            CexError::Optim(inner) => inner.into(),
            other => HarnessError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

impl From<crate::linalg::LinalgError> for HarnessError {
    fn from(e: crate::linalg::LinalgError) -> Self {
        HarnessError::Numerical(e.to_string())
    }
}
