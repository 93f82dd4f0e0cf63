//! File formats, generator plumbing, solver runs and experiment tables
//! behind the `qda` binary.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

pub mod experiment;
pub mod generate;
pub mod io;
pub mod manifest;
pub mod solve;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] qda_core::Error),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}
