use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::routes::Route;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GatewayConfig {
    #[serde(default = "default_listen")]
    pub listen: SocketAddr,
    pub keystore: PathBuf,
    pub routes: Vec<Route>,
    #[serde(default = "default_connect_timeout_ms")]
    pub connect_timeout_ms: u64,
    #[serde(default = "default_request_timeout_ms")]
    pub request_timeout_ms: u64,
    /// Key labels allowed to call `POST /admin/reload-keystore`.
    #[serde(default = "default_admin_labels")]
    pub admin_labels: Vec<String>,
    /// Static files served without authentication under `/demo/`.
    #[serde(default)]
    pub demo_dir: Option<PathBuf>,
}

fn default_listen() -> SocketAddr {
    "127.0.0.1:8080".parse().unwrap()
}

fn default_connect_timeout_ms() -> u64 {
    2000
}

fn default_request_timeout_ms() -> u64 {
    30_000
}

fn default_admin_labels() -> Vec<String> {
    vec!["admin".into()]
}

impl GatewayConfig {
    /// `/v1/tts/` and `/audio/` both forwarded to `upstream`.
    pub fn for_upstream(upstream: &str, keystore: impl Into<PathBuf>) -> Self {
        Self {
            listen: default_listen(),
            keystore: keystore.into(),
            routes: ["/v1/tts/", "/audio/"]
                .into_iter()
                .map(|p| Route { prefix: p.into(), upstream: upstream.into() })
                .collect(),
            connect_timeout_ms: default_connect_timeout_ms(),
            request_timeout_ms: default_request_timeout_ms(),
            admin_labels: default_admin_labels(),
            demo_dir: None,
        }
    }

    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
        Self::from_toml(&text)
    }

    pub fn connect_timeout(&self) -> Duration {
        Duration::from_millis(self.connect_timeout_ms)
    }

    pub fn request_timeout(&self) -> Duration {
        Duration::from_millis(self.request_timeout_ms)
    }
}
