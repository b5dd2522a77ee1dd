use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;

pub const CONFIG_FILE: &str = "msaforge.toml";

/// Defaults read from `msaforge.toml` in the working directory. Command-line
/// flags take precedence.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    pub entry_files: Vec<String>,
    pub output_dir: Option<PathBuf>,
    pub json: bool,
    pub fail_on_warning: bool,
}

impl Config {
    pub fn load(dir: &Path) -> anyhow::Result<Config> {
        let path = dir.join(CONFIG_FILE);
        if !path.is_file() {
            return Ok(Config::default());
        }
        let text =
            std::fs::read_to_string(&path).with_context(|| format!("reading {CONFIG_FILE}"))?;
        toml::from_str(&text).with_context(|| format!("invalid {CONFIG_FILE}"))
    }
}
