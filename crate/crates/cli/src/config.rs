//! TOML configuration and flag overrides.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use sec_gfd::data::SyntheticConfig;
use sec_gfd::experiments::{ClipMode, ClipVariant};
use sec_gfd::model::ModelConfig;
use sec_gfd::train::TrainConfig;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    pub edges: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    /// `"default"` for the `[synthetic]` section, or a TOML file of generator
    /// settings.
    pub synthetic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitSection {
    pub fractions: [f64; 3],
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSection {
    fn default() -> Self {
        SplitSection {
            fractions: [0.4, 0.2, 0.4],
            seed: 0,
            stratified: true,
        }
    }
}

impl SplitSection {
    pub fn tuple(&self) -> (f64, f64, f64) {
        (self.fractions[0], self.fractions[1], self.fractions[2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub seeds: Vec<u64>,
    pub ratios: Vec<f64>,
    pub orders: Vec<usize>,
    pub mode: ClipMode,
    pub variants: Vec<ClipVariant>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            seeds: (0..5).collect(),
            ratios: vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
            orders: (1..=6).collect(),
            mode: ClipMode::FullGraph,
            variants: ClipVariant::ALL.to_vec(),
        }
    }
}

/// Everything a command can be configured with.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CliConfig {
    pub data: DataSection,
    pub synthetic: SyntheticConfig,
    pub split: SplitSection,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub experiment: ExperimentSection,
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

impl CliConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => read_toml(p),
            None => Ok(CliConfig::default()),
        }
    }

    /// Generator settings named by `data.synthetic`, if any.
    pub fn synthetic_source(&self) -> Result<Option<SyntheticConfig>, CliError> {
        match self.data.synthetic.as_deref() {
            None => Ok(None),
            Some("default") => Ok(Some(self.synthetic.clone())),
            Some(path) => read_toml(Path::new(path)).map(Some),
        }
    }
}

/// Splits a comma-separated flag value.
pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|e| CliError::Usage(format!("bad {what} {s:?}: {e}")))
        })
        .collect()
}
