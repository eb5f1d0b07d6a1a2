//! Run configuration, read from TOML.

use std::path::{Path, PathBuf};

use depbase::baselines::BaselineKind;
use depbase_llm::EndpointConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

fn default_concurrency() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreebankPaths {
    /// Reference split: sampling baseline and prompt example.
    #[serde(default)]
    pub train: Option<PathBuf>,
    /// Evaluation split.
    pub test: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Label used in reports; defaults to the test file stem.
    #[serde(default)]
    pub name: Option<String>,
    /// UD release the files come from, e.g. "2.14".
    pub ud_version: String,
    pub treebank: TreebankPaths,
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub baselines: Vec<BaselineKind>,
    #[serde(default)]
    pub models: Vec<EndpointConfig>,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    /// Cache key component; defaults to `seed-<seed>`.
    #[serde(default)]
    pub run_id: Option<String>,
}

impl RunConfig {
    /// Parse TOML; relative paths are taken from `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut c: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut c.treebank.test);
        if let Some(t) = c.treebank.train.as_mut() {
            fix(t);
        }
        fix(&mut c.output_dir);
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            let stem = self
                .treebank
                .test
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            stem.strip_suffix("-ud-test").unwrap_or(&stem).to_string()
        })
    }

    pub fn run_id(&self) -> String {
        self.run_id.clone().unwrap_or_else(|| format!("seed-{}", self.seed))
    }

    /// Checks that do not touch the file system.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.baselines.is_empty() && self.models.is_empty() {
            return Err(CliError::Config("no systems configured".into()));
        }
        if self.concurrency == 0 {
            return Err(CliError::Config("concurrency must be at least 1".into()));
        }
        Ok(())
    }
}
