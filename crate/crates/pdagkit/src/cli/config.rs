//! Versioned TOML run configuration. Command-line flags override it.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::dataset::Style;
use crate::engine::{FilterMode, StatementSelection};
use crate::harness::{HttpConfig, Mode};
use crate::hypothesis::HypothesisKind;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub version: u32,
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub engine: EngineSection,
    pub generate: GenerateSection,
    pub eval: EvalSection,
    pub backend: Option<HttpConfig>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineSection {
    pub filter: Option<FilterMode>,
    pub propagate: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateSection {
    pub n: Option<Vec<usize>>,
    pub style: Option<Style>,
    pub theme: Option<String>,
    pub per_cell: Option<usize>,
    pub max_cond: Option<usize>,
    pub selection: Option<StatementSelection>,
    pub kinds: Option<Vec<HypothesisKind>>,
    pub gzip: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Mock,
    Http,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub mode: Option<Mode>,
    pub backend: Option<BackendKind>,
    pub parallelism: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: FileConfig =
            toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        if cfg.version != CONFIG_VERSION {
            return Err(CliError::Usage(format!(
                "config version {} is not supported (expected {CONFIG_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }
}
