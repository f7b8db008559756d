//! Service configuration: TOML file plus `VOXSYNC_*` environment overrides.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use voxsync_core::synth::Backend;

pub const ENV_PREFIX: &str = "VOXSYNC_";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parsing config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("environment variable {name}: {message}")]
    Env { name: String, message: String },
    #[error("invalid voice id {0:?}: use lowercase letters, digits, '-' and '_'")]
    InvalidVoiceId(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoiceConfig {
    pub backend: Backend,
    /// cmudict-format file; the bundled subset when absent.
    #[serde(default)]
    pub cmudict: Option<PathBuf>,
    /// `word<TAB>PHONES` file; the bundled list when absent.
    #[serde(default)]
    pub custom_lexicon: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    #[serde(default = "default_listen")]
    pub listen: SocketAddr,
    /// Prefix of every returned audio URL, without a trailing slash.
    #[serde(default = "default_base_url")]
    pub base_url: String,
    #[serde(default = "default_storage_root")]
    pub storage_root: PathBuf,
    #[serde(default = "default_journal_path")]
    pub journal_path: PathBuf,
    /// Worker count; the number of logical CPUs when absent.
    #[serde(default)]
    pub pool_size: Option<usize>,
    #[serde(default = "default_queue_depth")]
    pub queue_depth: usize,
    #[serde(default = "default_queue_timeout_ms")]
    pub queue_timeout_ms: u64,
    /// Cache entry cap; unbounded when absent.
    #[serde(default)]
    pub max_cache_entries: Option<usize>,
    #[serde(default)]
    pub voices: BTreeMap<String, VoiceConfig>,
}

fn default_listen() -> SocketAddr {
    "127.0.0.1:8081".parse().unwrap()
}

fn default_base_url() -> String {
    "http://127.0.0.1:8080".into()
}

fn default_storage_root() -> PathBuf {
    "var/storage".into()
}

fn default_journal_path() -> PathBuf {
    "var/cache.jsonl".into()
}

fn default_queue_depth() -> usize {
    64
}

fn default_queue_timeout_ms() -> u64 {
    5000
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            listen: default_listen(),
            base_url: default_base_url(),
            storage_root: default_storage_root(),
            journal_path: default_journal_path(),
            pool_size: None,
            queue_depth: default_queue_depth(),
            queue_timeout_ms: default_queue_timeout_ms(),
            max_cache_entries: None,
            voices: BTreeMap::new(),
        }
    }
}

pub fn valid_voice_id(id: &str) -> bool {
    !id.is_empty() && id.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-' || b == b'_')
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Reads `path` and applies overrides from the process environment.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
        let mut config: Self = toml::from_str(&text)?;
        config.apply_env(std::env::vars())?;
        config.validate()?;
        Ok(config)
    }

    /// Applies `VOXSYNC_LISTEN`, `VOXSYNC_BASE_URL`, `VOXSYNC_STORAGE_ROOT`,
    /// `VOXSYNC_JOURNAL_PATH`, `VOXSYNC_POOL_SIZE`, `VOXSYNC_QUEUE_DEPTH`,
    /// `VOXSYNC_QUEUE_TIMEOUT_MS` and `VOXSYNC_MAX_CACHE_ENTRIES`. Other
    /// variables are ignored.
    pub fn apply_env<I, K, V>(&mut self, vars: I) -> Result<(), ConfigError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        for (name, value) in vars {
            let (name, value) = (name.as_ref(), value.as_ref());
            let Some(key) = name.strip_prefix(ENV_PREFIX) else { continue };
            let bad = |message: String| ConfigError::Env { name: name.to_owned(), message };
            match key {
                "LISTEN" => self.listen = value.parse().map_err(|e| bad(format!("{e}")))?,
                "BASE_URL" => self.base_url = value.to_owned(),
                "STORAGE_ROOT" => self.storage_root = value.into(),
                "JOURNAL_PATH" => self.journal_path = value.into(),
                "POOL_SIZE" => self.pool_size = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                "QUEUE_DEPTH" => self.queue_depth = value.parse().map_err(|e| bad(format!("{e}")))?,
                "QUEUE_TIMEOUT_MS" => self.queue_timeout_ms = value.parse().map_err(|e| bad(format!("{e}")))?,
                "MAX_CACHE_ENTRIES" => self.max_cache_entries = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
                _ => {}
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(id) = self.voices.keys().find(|id| !valid_voice_id(id)) {
            return Err(ConfigError::InvalidVoiceId(id.clone()));
        }
        if self.voices.is_empty() {
            return Err(ConfigError::Invalid("no voices configured".into()));
        }
        if self.pool_size == Some(0) {
            return Err(ConfigError::Invalid("pool_size must be at least 1".into()));
        }
        if self.queue_depth == 0 {
            return Err(ConfigError::Invalid("queue_depth must be at least 1".into()));
        }
        if self.max_cache_entries == Some(0) {
            return Err(ConfigError::Invalid("max_cache_entries must be at least 1".into()));
        }
        Ok(())
    }

    pub fn workers(&self) -> usize {
        self.pool_size.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
    }

    pub fn queue_timeout(&self) -> Duration {
        Duration::from_millis(self.queue_timeout_ms)
    }

    pub fn base_url(&self) -> &str {
        self.base_url.trim_end_matches('/')
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
listen = "127.0.0.1:9000"
base_url = "http://localhost:8080/"
storage_root = "/tmp/vs"
journal_path = "/tmp/vs/cache.jsonl"
pool_size = 2

[voices.einstein]
backend = "mock_glim"
custom_lexicon = "lex.tsv"

[voices.fast]
backend = "mock_fast"
"#;

    #[test]
    fn parses_file() {
        let c = ServiceConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(c.listen.port(), 9000);
        assert_eq!(c.base_url(), "http://localhost:8080");
        assert_eq!(c.workers(), 2);
        assert_eq!(c.queue_depth, 64);
        assert_eq!(c.queue_timeout(), Duration::from_secs(5));
        assert_eq!(c.voices["einstein"].backend, Backend::MockGlim);
        assert_eq!(c.voices["einstein"].custom_lexicon.as_deref(), Some(Path::new("lex.tsv")));
        assert_eq!(c.voices["fast"].cmudict, None);
    }

    #[test]
    fn env_overrides() {
        let mut c = ServiceConfig::from_toml(SAMPLE).unwrap();
        c.apply_env([("VOXSYNC_POOL_SIZE", "7"), ("VOXSYNC_BASE_URL", "https://x"), ("PATH", "/bin")]).unwrap();
        assert_eq!(c.workers(), 7);
        assert_eq!(c.base_url(), "https://x");
        let err = c.apply_env([("VOXSYNC_QUEUE_DEPTH", "lots")]).unwrap_err();
        assert!(matches!(err, ConfigError::Env { .. }));
    }

    #[test]
    fn rejects_bad_voice_ids() {
        for id in ["../etc", "Upper", "a b", ""] {
            let text = format!("[voices.\"{id}\"]\nbackend = \"mock_fast\"\n");
            assert!(ServiceConfig::from_toml(&text).is_err(), "{id:?}");
        }
        assert!(valid_voice_id("de_einstein-2"));
    }

    #[test]
    fn rejects_unknown_backend() {
        assert!(ServiceConfig::from_toml("[voices.a]\nbackend = \"wavenet\"\n").is_err());
    }
}
