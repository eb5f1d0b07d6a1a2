//! Querying instruction-tuned models for CoNLL-format parses.

pub mod cache;
pub mod client;
pub mod mock;
pub mod prompt;

use std::path::PathBuf;

use thiserror::Error;

pub use cache::{ResponseCache, RunRecord};
pub use client::{Client, EndpointConfig, Job, RetryPolicy};
pub use prompt::{build_prompt, pick_example, PromptSpec};

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("treebank {0} has no sentence of 4 to 7 words to use as the example")]
    NoExample(String),
    #[error("cache {0}: {1}")]
    Cache(PathBuf, #[source] std::io::Error),
    #[error("gave up after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("endpoint answered HTTP {status}: {body}")]
    Endpoint { status: u16, body: String },
    #[error("response has no assistant message: {0}")]
    BadResponse(String),
}
