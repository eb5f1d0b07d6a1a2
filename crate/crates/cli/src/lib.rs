//! Orchestration of baseline and model runs and their reports.

pub mod config;
pub mod io;
pub mod report;
pub mod run;

use std::path::PathBuf;

use thiserror::Error;

pub use config::RunConfig;
pub use report::RunSummary;
pub use run::{cmd_baseline, cmd_llm, cmd_report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error("{0}: {1}")]
    Treebank(PathBuf, #[source] depbase::conllu::ConlluError),
    #[error("{0}: treebank has no sentences")]
    EmptyTreebank(PathBuf),
    #[error("runs mix UD versions {0} and {1}")]
    MixedVersions(String, String),
    #[error(transparent)]
    Baseline(#[from] depbase::baselines::BaselineError),
    #[error(transparent)]
    Metrics(#[from] depbase::metrics::MetricsError),
    #[error(transparent)]
    Llm(#[from] depbase_llm::LlmError),
}
