//! Benchmark harness for `tastar-core`: scenario and result file formats,
//! the parallel experiment driver and the summary tables behind the CLI.

pub mod commands;
pub mod formats;
pub mod harness;
pub mod records;
pub mod summary;

use std::io;
use std::path::{Path, PathBuf};

use tastar_core::{GeometryError, PlanError, ReplayError, ScenarioError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("invalid scenario: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("invalid obstacle: {0}")]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    Plan(#[from] PlanError),
    #[error("replay: {0}")]
    Replay(#[from] ReplayError),
    #[error("cohort is missing {} scenario(s): {}", .0.len(), .0.join(", "))]
    MissingScenarios(Vec<String>),
    #[error("{}: {inner}", path.display())]
    At { path: PathBuf, inner: Box<Error> },
    #[error("{0}")]
    Other(String),
}

impl Error {
    pub fn io(path: &Path, source: io::Error) -> Error {
        Error::Io { path: path.to_path_buf(), source }
    }

    /// Tags the error with the file it came from, unless it already names one.
    pub fn context(self, path: &Path) -> Error {
        match self {
            e @ (Error::Io { .. } | Error::At { .. }) => e,
            e => Error::At { path: path.to_path_buf(), inner: Box::new(e) },
        }
    }
}
