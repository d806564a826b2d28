use std::fs;
use std::path::{Path, PathBuf};

use quadcoach_core::feedback::TemplatePack;
use quadcoach_core::stl::SpecSet;
use quadcoach_core::PipelineConfig;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formats::{load_specs, load_templates, FormatError};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("unsupported config version {0}, expected {CONFIG_VERSION}")]
    Version(u32),
    #[error("simulation settings: {0}")]
    Sim(#[from] quadcoach_core::sim::ConfigError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

/// How new sessions get their feedback condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Assignment {
    /// Baseline, Text, Multimodal, Baseline, ...
    #[default]
    RoundRobin,
    /// Uniform draw per session, reproducible from the seed.
    Seeded { seed: u64 },
}

/// Remote feedback generator speaking the chat-completions protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderConfig {
    pub endpoint: String,
    pub model: String,
    /// Environment variable holding the API credential.
    pub credential_env: String,
    pub timeout_secs: u64,
    pub max_tokens: u32,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self {
            endpoint: "http://127.0.0.1:9000/v1/chat/completions".into(),
            model: "feedback-model".into(),
            credential_env: "QUADCOACH_PROVIDER_KEY".into(),
            timeout_secs: 30,
            max_tokens: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServiceConfig {
    pub version: u32,
    pub bind: String,
    pub port: u16,
    pub data_dir: PathBuf,
    /// Specification file; the bundled landing-task specs when unset.
    pub spec_path: Option<PathBuf>,
    /// Template pack; the bundled pack when unset.
    pub template_path: Option<PathBuf>,
    /// Remote generator; template feedback only when unset.
    pub provider: Option<ProviderConfig>,
    pub assignment: Assignment,
    pub pipeline: PipelineConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            bind: "127.0.0.1".into(),
            port: 8080,
            data_dir: PathBuf::from("data"),
            spec_path: None,
            template_path: None,
            provider: None,
            assignment: Assignment::RoundRobin,
            pipeline: PipelineConfig::default(),
        }
    }
}

impl ServiceConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let config: Self = serde_json::from_str(&text).map_err(|source| ConfigError::Json {
            path: path.display().to_string(),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.version != CONFIG_VERSION {
            return Err(ConfigError::Version(self.version));
        }
        self.pipeline.sim.validate()?;
        Ok(())
    }

    pub fn specs(&self) -> Result<SpecSet, ConfigError> {
        Ok(match &self.spec_path {
            Some(path) => load_specs(path)?,
            None => SpecSet::table1(),
        })
    }

    pub fn templates(&self) -> Result<TemplatePack, ConfigError> {
        Ok(match &self.template_path {
            Some(path) => load_templates(path)?,
            None => TemplatePack::default(),
        })
    }
}
