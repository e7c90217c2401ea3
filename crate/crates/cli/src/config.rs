use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

/// Defaults read from `--config FILE`. Command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threshold: Option<f64>,
    pub classifier: Option<String>,
    pub generator: Option<String>,
    pub classifier_url: Option<String>,
    pub generator_url: Option<String>,
    pub graph: Option<PathBuf>,
    pub timeout: Option<u64>,
    pub batch_size: Option<usize>,
    pub max_length: Option<usize>,
    pub pwi_threshold: Option<f64>,
    pub host: Option<String>,
    pub port: Option<u16>,
    #[serde(default)]
    pub cors_origins: Vec<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}
