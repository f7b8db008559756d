//! Request handling: cache lookup, coalesced synthesis, storage, write-back.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use futures::future::{BoxFuture, FutureExt, Shared};
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use voxsync_core::synth::{Backend, SynthError, Voice, VoiceError};
use voxsync_core::text::{normalize_text, LexiconError, LexiconStack, NormalizeError, MAX_TEXT_CHARS};
use voxsync_core::wav::encode_wav;
use voxsync_core::Exec;

use crate::cache::{Cache, CacheEntry, CacheError};
use crate::config::ServiceConfig;
use crate::key::CacheKey;
use crate::metrics::{Metrics, Snapshot};
use crate::pool::{PoolError, WorkerPool};
use crate::store::{FsObjectStore, ObjectStore, StoreError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisRequest {
    pub text: String,
    pub voice: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub url: String,
    pub cached: bool,
    /// Zero for cached responses.
    pub synthesis_ms: u64,
    pub audio_duration_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ServiceError {
    #[error("unknown voice {0:?}")]
    UnknownVoice(String),
    #[error("text is {chars} characters long, limit is {MAX_TEXT_CHARS}")]
    TextTooLong { chars: usize },
    #[error("text contains no pronounceable words")]
    EmptyText,
    #[error("{0}")]
    BadRequest(String),
    #[error("synthesis queue is full, retry later")]
    PoolSaturated,
    #[error("object storage is full")]
    StorageFull,
    #[error("storage error: {0}")]
    Storage(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl ServiceError {
    pub const CODES: [&'static str; 8] = [
        "unknown_voice",
        "text_too_long",
        "empty_text",
        "bad_request",
        "pool_saturated",
        "storage_full",
        "storage_error",
        "internal",
    ];

    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownVoice(_) => "unknown_voice",
            ServiceError::TextTooLong { .. } => "text_too_long",
            ServiceError::EmptyText => "empty_text",
            ServiceError::BadRequest(_) => "bad_request",
            ServiceError::PoolSaturated => "pool_saturated",
            ServiceError::StorageFull => "storage_full",
            ServiceError::Storage(_) => "storage_error",
            ServiceError::Internal(_) => "internal",
        }
    }

    pub fn status(&self) -> u16 {
        match self {
            ServiceError::UnknownVoice(_) => 404,
            ServiceError::TextTooLong { .. } | ServiceError::EmptyText | ServiceError::BadRequest(_) => 400,
            ServiceError::PoolSaturated => 503,
            ServiceError::StorageFull => 507,
            ServiceError::Storage(_) | ServiceError::Internal(_) => 500,
        }
    }
}

impl From<PoolError> for ServiceError {
    fn from(e: PoolError) -> Self {
        match e {
            PoolError::Saturated | PoolError::QueueTimeout => ServiceError::PoolSaturated,
            PoolError::WorkerLost => ServiceError::Internal(e.to_string()),
        }
    }
}

impl From<StoreError> for ServiceError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::StorageFull => ServiceError::StorageFull,
            StoreError::Io(e) => ServiceError::Storage(e.to_string()),
        }
    }
}

impl From<VoiceError> for ServiceError {
    fn from(e: VoiceError) -> Self {
        match e {
            VoiceError::Normalize(NormalizeError::EmptyAfterNormalization) => ServiceError::EmptyText,
            VoiceError::Normalize(NormalizeError::TooLong { chars }) => ServiceError::TextTooLong { chars },
            VoiceError::Synth(SynthError::EmptyInput) => ServiceError::EmptyText,
            VoiceError::Synth(e) => ServiceError::Internal(e.to_string()),
        }
    }
}

#[derive(Debug, Error)]
pub enum StartError {
    #[error("voice {voice}: {source}")]
    Lexicon { voice: String, source: LexiconError },
    #[error("voice {voice}: {source}")]
    Synth { voice: String, source: SynthError },
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("object storage at {path}: {source}")]
    Store { path: String, source: std::io::Error },
}

/// Warm per-worker synthesizers, one per registered voice.
struct WorkerState {
    voices: HashMap<String, Voice>,
}

#[derive(Debug, Clone)]
struct Fresh {
    url: String,
    synthesis_ms: u64,
    audio_duration_ms: u64,
}

type Flight = Shared<BoxFuture<'static, Result<Fresh, ServiceError>>>;

pub struct TtsService {
    voices: BTreeMap<String, Backend>,
    pool: WorkerPool<WorkerState>,
    cache: Cache,
    store: Arc<dyn ObjectStore>,
    inflight: Mutex<HashMap<CacheKey, Flight>>,
    metrics: Metrics,
}

impl std::fmt::Debug for TtsService {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TtsService").field("voices", &self.voices).field("workers", &self.pool.workers()).finish()
    }
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

impl TtsService {
    pub fn new(config: &ServiceConfig) -> Result<Self, StartError> {
        let store = FsObjectStore::new(&config.storage_root, config.base_url())
            .map_err(|source| StartError::Store { path: config.storage_root.display().to_string(), source })?;
        Self::with_store(config, Arc::new(store))
    }

    pub fn with_store(config: &ServiceConfig, store: Arc<dyn ObjectStore>) -> Result<Self, StartError> {
        let mut lexicons = Vec::new();
        for (id, v) in &config.voices {
            let lex = LexiconStack::from_paths(v.custom_lexicon.as_deref(), v.cmudict.as_deref())
                .map_err(|source| StartError::Lexicon { voice: id.clone(), source })?;
            lexicons.push((id.clone(), v.backend, Arc::new(lex)));
        }
        let pool = WorkerPool::new(config.workers(), config.queue_depth, config.queue_timeout(), |_| {
            let mut voices = HashMap::new();
            for (id, backend, lex) in &lexicons {
                let voice = Voice::new(id.clone(), *backend, lex.clone(), Exec::Sequential)
                    .map_err(|source| StartError::Synth { voice: id.clone(), source })?;
                voices.insert(id.clone(), voice);
            }
            Ok::<_, StartError>(WorkerState { voices })
        })?;
        Ok(Self {
            voices: config.voices.iter().map(|(id, v)| (id.clone(), v.backend)).collect(),
            pool,
            cache: Cache::open(&config.journal_path, config.max_cache_entries)?,
            store,
            inflight: Mutex::new(HashMap::new()),
            metrics: Metrics::with_error_codes(&ServiceError::CODES),
        })
    }

    pub fn voices(&self) -> &BTreeMap<String, Backend> {
        &self.voices
    }

    pub fn has_voice(&self, voice: &str) -> bool {
        self.voices.contains_key(voice)
    }

    pub fn store(&self) -> &dyn ObjectStore {
        self.store.as_ref()
    }

    pub fn cache(&self) -> &Cache {
        &self.cache
    }

    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    pub fn snapshot(&self) -> Snapshot {
        self.metrics.snapshot()
    }

    /// Handles one request and records it in the metrics.
    pub async fn synthesize(self: &Arc<Self>, req: &SynthesisRequest) -> Result<SynthesisResult, ServiceError> {
        let start = Instant::now();
        self.metrics.request();
        let result = self.resolve(req).await;
        match &result {
            Ok(r) if r.cached => self.metrics.cache_hit(),
            Ok(_) => {}
            Err(e) => self.metrics.error(e.code()),
        }
        self.metrics.observe(start.elapsed());
        result
    }

    async fn resolve(self: &Arc<Self>, req: &SynthesisRequest) -> Result<SynthesisResult, ServiceError> {
        if !self.has_voice(&req.voice) {
            return Err(ServiceError::UnknownVoice(req.voice.clone()));
        }
        let chars = req.text.chars().count();
        if chars > MAX_TEXT_CHARS {
            return Err(ServiceError::TextTooLong { chars });
        }
        let key = CacheKey::new(&req.voice, &req.text);
        if let Some(hit) = self.cache.get(&key) {
            return Ok(cached(&hit));
        }
        normalize_text(&req.text).map_err(VoiceError::from)?;

        let (flight, leader) = {
            let mut inflight = self.inflight.lock();
            // The flight writes the cache before leaving this map, so a miss
            // here plus no flight means nobody has synthesized the key yet.
            if let Some(hit) = self.cache.get(&key) {
                return Ok(cached(&hit));
            }
            match inflight.get(&key) {
                Some(f) => (f.clone(), false),
                None => {
                    let f = self.start_flight(key, req.clone());
                    inflight.insert(key, f.clone());
                    (f, true)
                }
            }
        };
        let fresh = flight.await?;
        Ok(SynthesisResult {
            url: fresh.url,
            cached: !leader,
            synthesis_ms: if leader { fresh.synthesis_ms } else { 0 },
            audio_duration_ms: fresh.audio_duration_ms,
        })
    }

    fn start_flight(self: &Arc<Self>, key: CacheKey, req: SynthesisRequest) -> Flight {
        let svc = Arc::clone(self);
        let task = tokio::spawn(async move {
            let result = svc.render_and_store(key, req).await;
            svc.inflight.lock().remove(&key);
            result
        });
        async move { task.await.unwrap_or_else(|e| Err(ServiceError::Internal(e.to_string()))) }.boxed().shared()
    }

    async fn render_and_store(&self, key: CacheKey, req: SynthesisRequest) -> Result<Fresh, ServiceError> {
        let store = Arc::clone(&self.store);
        let voice_id = req.voice.clone();
        let ticket = self.pool.submit(move |state: &WorkerState| {
            let voice = state.voices.get(&req.voice).ok_or_else(|| ServiceError::UnknownVoice(req.voice.clone()))?;
            let start = Instant::now();
            let rendered = voice.render(&req.text)?;
            let synthesis_ms = start.elapsed().as_millis() as u64;
            let wave = &rendered.wave;
            let bytes = encode_wav(wave);
            let url = store.put(&req.voice, &key, &bytes)?;
            let audio_duration_ms = (wave.len() as u64 * 1000).div_ceil(wave.sample_rate() as u64);
            Ok::<_, ServiceError>((Fresh { url, synthesis_ms, audio_duration_ms }, bytes.len() as u64))
        })?;
        let (fresh, audio_bytes) = ticket.wait().await?.value?;
        let entry = CacheEntry {
            key: key.to_hex(),
            url: fresh.url.clone(),
            created_at: now_ms(),
            audio_bytes,
            audio_duration_ms: fresh.audio_duration_ms,
        };
        self.cache.put(key, entry).map_err(|e| ServiceError::Storage(e.to_string()))?;
        self.metrics.synthesized();
        tracing::debug!(voice = %voice_id, key = %key, ms = fresh.synthesis_ms, "synthesized");
        Ok(fresh)
    }
}

fn cached(entry: &CacheEntry) -> SynthesisResult {
    SynthesisResult {
        url: entry.url.clone(),
        cached: true,
        synthesis_ms: 0,
        audio_duration_ms: entry.audio_duration_ms,
    }
}
