use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use curvature::{BodySpec, ConvexBody};

use crate::args::{Params, Preset};
use crate::error::{CliError, Result};

/// A preset run as read from a TOML file, e.g.
///
/// ```toml
/// preset = "ftl-growth"
/// seed = 3
/// out = "runs/growth"
///
/// [params]
/// horizon = 1000
/// seeds = 5
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: Preset,
    /// Body spec path, relative to the config file.
    #[serde(default)]
    pub body: Option<PathBuf>,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::from_toml(&text)
            .map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.body = cfg.body.map(|b| base.join(b));
        cfg.out = cfg.out.map(|o| base.join(o));
        Ok(cfg)
    }
}

pub fn load_spec(path: &Path) -> Result<BodySpec> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    BodySpec::from_json(&text)
        .map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

/// The spec and the validated body.
pub fn load_body(path: &Path) -> Result<(BodySpec, ConvexBody)> {
    let spec = load_spec(path)?;
    let body = spec
        .build()
        .map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
    Ok((spec, body))
}
