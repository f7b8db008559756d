//! Synchronous text-to-speech service.
//!
//! `POST /v1/tts/sync` looks the exact `(voice, text)` pair up in a journaled
//! URL cache. On a miss the request is synthesized on a warm worker pool,
//! encoded as WAV, written to object storage and recorded in the cache.
//! Concurrent misses for the same pair share a single synthesis.

pub mod cache;
pub mod config;
pub mod http;
pub mod key;
pub mod metrics;
pub mod pool;
pub mod service;
pub mod store;

pub use cache::{Cache, CacheEntry, CacheError};
pub use config::{ConfigError, ServiceConfig, VoiceConfig};
pub use http::{router, spawn, RunningServer};
pub use key::CacheKey;
pub use metrics::{parse_metrics, Metrics, Snapshot};
pub use pool::{PoolError, WorkerPool};
pub use service::{ServiceError, StartError, SynthesisRequest, SynthesisResult, TtsService};
pub use store::{FsObjectStore, ObjectStore, StoreError};
