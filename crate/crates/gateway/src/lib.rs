//! Reverse proxy in front of the TTS service.
//!
//! Every request except `/healthz` and the optional `/demo/` assets must
//! carry an `x-api-key` whose SHA-256 is enabled in the keystore. Allowed
//! requests are forwarded by longest path prefix with an `X-Request-Id`.

pub mod config;
pub mod keystore;
pub mod proxy;
pub mod routes;

pub use config::GatewayConfig;
pub use keystore::{hash_key, ApiKeyRecord, Deny, Keystore, KeystoreError, SharedKeystore};
pub use proxy::{app, Gateway, GatewayError, API_KEY_HEADER, REQUEST_ID_HEADER};
pub use routes::{Route, RouteError, RouteTable};
