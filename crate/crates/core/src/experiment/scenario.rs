//! Scenario files: one run configuration plus where to write its outputs.
//!
//! Files ending in `.json` are parsed as JSON, everything else as TOML.
//! Unknown keys are rejected at every level.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adversary::AdversaryConfig;
use crate::engine::{RunConfig, Sampling, Stop, Verbosity};
use crate::error::{ConfigError, Error, Result};
use crate::protocol::{ProtocolKind, ProtocolParams};

fn default_c() -> f64 {
    ProtocolParams::default().c
}

fn default_d() -> f64 {
    ProtocolParams::default().d
}

fn default_gamma() -> f64 {
    ProtocolParams::default().gamma
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub kind: ProtocolKind,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_d")]
    pub d: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub sampling: Sampling,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Relative paths resolve against the output directory.
    pub trace_path: Option<PathBuf>,
    pub metrics_path: Option<PathBuf>,
    pub csv_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub protocol: ProtocolSection,
    pub adversary: AdversaryConfig,
    pub seed: u64,
    pub stop: Stop,
    #[serde(default)]
    pub verbosity: Verbosity,
    #[serde(default)]
    pub outputs: Outputs,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let scenario = Self::parse(&text, path)?;
        scenario.run_config()?;
        Ok(scenario)
    }

    /// Parses `text`; `path` selects the format and labels errors.
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        parse_document(text, path)
    }

    pub fn run_config(&self) -> Result<RunConfig, ConfigError> {
        let params = ProtocolParams::new(self.protocol.c, self.protocol.d, self.protocol.gamma)?;
        let config = RunConfig::new(self.protocol.kind, self.adversary.clone(), self.seed, self.stop)
            .with_params(params)
            .with_verbosity(self.verbosity)
            .with_sampling(self.protocol.sampling);
        config.validate()?;
        Ok(config)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

pub(crate) fn parse_document<T: serde::de::DeserializeOwned>(text: &str, path: &Path) -> Result<T, ConfigError> {
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let parsed = if is_json {
        serde_json::from_str(text).map_err(|e| e.to_string())
    } else {
        toml::from_str(text).map_err(|e| e.to_string())
    };
    parsed.map_err(|message| ConfigError::Parse {
        path: path.to_path_buf(),
        message,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BATCH: &str = r#"
seed = 3

[protocol]
kind = "ReBackoff2"

[adversary]
kind = "Batch"
n = 8

[stop]
mode = "all_done"
max_slots = 100000
"#;

    #[test]
    fn toml_with_defaults() {
        let s = ScenarioFile::parse(BATCH, Path::new("a.toml")).unwrap();
        let config = s.run_config().unwrap();
        assert_eq!(config.params, ProtocolParams::default());
        assert_eq!(config.adversary, AdversaryConfig::Batch { n: 8, slot: 0 });
        assert_eq!(config.seed, 3);
    }

    #[test]
    fn json_is_accepted() {
        let json = r#"{"seed": 1, "protocol": {"kind": "BEB"},
            "adversary": {"kind": "Poisson", "rate": 0.1},
            "stop": {"mode": "max_slots", "limit": 10}}"#;
        let s = ScenarioFile::parse(json, Path::new("a.json")).unwrap();
        assert_eq!(s.protocol.kind, ProtocolKind::Beb);
    }

    #[test]
    fn unknown_and_missing_keys_are_rejected() {
        let unknown = BATCH.replace("seed = 3", "seed = 3\ncolour = 1");
        assert!(ScenarioFile::parse(&unknown, Path::new("a.toml")).is_err());
        let nested = BATCH.replace("n = 8", "n = 8\nburst = 2");
        assert!(ScenarioFile::parse(&nested, Path::new("a.toml")).is_err());
        let missing = BATCH.replace("seed = 3", "");
        assert!(ScenarioFile::parse(&missing, Path::new("a.toml")).is_err());
    }

    #[test]
    fn infinite_arrivals_cannot_wait_for_completion() {
        let s = BATCH.replace("kind = \"Batch\"\nn = 8", "kind = \"Poisson\"\nrate = 0.2");
        let s = ScenarioFile::parse(&s, Path::new("a.toml")).unwrap();
        assert!(s.run_config().is_err());
    }
}
