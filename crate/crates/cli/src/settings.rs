//! Layered settings: config file, then environment, then flags.

use std::fs;
use std::net::IpAddr;
use std::path::{Path, PathBuf};

use jarvis_service::ServerConfig;
use serde::Deserialize;

/// Keys accepted in the TOML config file. All optional.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub host: Option<IpAddr>,
    pub port: Option<u16>,
    pub fleet: Option<PathBuf>,
    pub intents: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub log: Option<PathBuf>,
}

impl FileConfig {
    pub fn read(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Values given on the command line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub port: Option<u16>,
    pub fleet: Option<PathBuf>,
    pub intents: Option<PathBuf>,
    pub templates: Option<PathBuf>,
    pub log: Option<PathBuf>,
}

pub const FLEET_ENV: &str = "JARVIS_FLEET";
pub const INTENTS_ENV: &str = "JARVIS_INTENTS";
pub const TEMPLATES_ENV: &str = "JARVIS_TEMPLATES";
pub const LOG_ENV: &str = "JARVIS_LOG";

pub fn resolve(
    file: Option<FileConfig>,
    env: impl Fn(&str) -> Option<String>,
    flags: &Overrides,
) -> Result<ServerConfig, String> {
    let mut c = ServerConfig::default();
    if let Some(f) = file {
        c.host = f.host.unwrap_or(c.host);
        c.port = f.port.unwrap_or(c.port);
        c.fleet = f.fleet.or(c.fleet);
        c.intents = f.intents.or(c.intents);
        c.templates = f.templates.or(c.templates);
        c.log = f.log.or(c.log);
    }
    c.apply_env(&env).map_err(|e| e.to_string())?;
    let path_env = |key: &str| env(key).filter(|v| !v.is_empty()).map(PathBuf::from);
    c.fleet = path_env(FLEET_ENV).or(c.fleet);
    c.intents = path_env(INTENTS_ENV).or(c.intents);
    c.templates = path_env(TEMPLATES_ENV).or(c.templates);
    c.log = path_env(LOG_ENV).or(c.log);

    c.port = flags.port.unwrap_or(c.port);
    c.fleet = flags.fleet.clone().or(c.fleet);
    c.intents = flags.intents.clone().or(c.intents);
    c.templates = flags.templates.clone().or(c.templates);
    c.log = flags.log.clone().or(c.log);
    Ok(c)
}
