use std::fs;
use std::io;
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};

use jarvis_core::assets;
use jarvis_core::sparql::TemplateSet;
use jarvis_core::{Jarvis, SetupError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PORT_ENV: &str = "JARVIS_PORT";
pub const DEFAULT_PORT: u16 = 8080;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Setup { path: PathBuf, source: SetupError },
    #[error("{var}={value:?} is not a port number")]
    BadPort { var: &'static str, value: String },
}

/// Where to listen and which files to load. Unset paths fall back to the
/// bundled demo data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ServerConfig {
    pub host: IpAddr,
    pub port: u16,
    pub fleet: Option<PathBuf>,
    pub intents: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub log: Option<PathBuf>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            host: IpAddr::V4(Ipv4Addr::LOCALHOST),
            port: DEFAULT_PORT,
            fleet: None,
            intents: None,
            templates: None,
            log: None,
        }
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })
}

impl ServerConfig {
    pub fn addr(&self) -> SocketAddr {
        SocketAddr::new(self.host, self.port)
    }

    /// Applies `JARVIS_PORT` as read through `lookup`.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        if let Some(value) = lookup(PORT_ENV) {
            self.port = value.trim().parse().map_err(|_| ConfigError::BadPort { var: PORT_ENV, value })?;
        }
        Ok(())
    }

    /// Reads and checks every configured file and builds the graph.
    pub fn load(&self) -> Result<Jarvis, ConfigError> {
        let fleet = match &self.fleet {
            Some(p) => read(p)?,
            None => assets::DEMO_FLEET.to_string(),
        };
        let intents = match &self.intents {
            Some(p) => read(p)?,
            None => assets::TRAINING.to_string(),
        };
        let templates = match &self.templates {
            Some(dir) => {
                TemplateSet::load_dir(dir).map_err(|source| ConfigError::Read { path: dir.clone(), source })?
            }
            None => assets::templates(),
        };
        let blame = |source: SetupError| {
            let path = match &source {
                SetupError::Fleet(_) => self.fleet.clone(),
                SetupError::Intent(_) => self.intents.clone(),
                SetupError::MissingTemplate(_) | SetupError::Template { .. } => self.templates.clone(),
            };
            ConfigError::Setup { path: path.unwrap_or_else(|| "<bundled>".into()), source }
        };
        Jarvis::from_sources(&fleet, &intents, templates).map_err(blame)
    }
}
