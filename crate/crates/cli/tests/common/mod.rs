#![allow(dead_code)]

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use axum::extract::Request;
use axum::middleware::{self, Next};
use tokio::net::TcpListener;
use voxsync_core::synth::Backend;
use voxsync_gateway::{app, hash_key, Gateway, GatewayConfig};
use voxsync_service::{router, spawn, RunningServer, ServiceConfig, TtsService, VoiceConfig};

pub const VALID_KEY: &str = "demo-secret";
pub const DISABLED_KEY: &str = "retired-secret";

/// Service behind the gateway on loopback, counting requests that reach the service.
pub struct Stack {
    pub gateway: String,
    pub service: RunningServer,
    pub svc: Arc<TtsService>,
    pub upstream_hits: Arc<AtomicUsize>,
}

impl Stack {
    pub fn hits(&self) -> usize {
        self.upstream_hits.load(Ordering::SeqCst)
    }
}

pub fn service_config(dir: &Path, backend: Backend, workers: usize) -> ServiceConfig {
    let mut c = ServiceConfig {
        storage_root: dir.join("storage"),
        journal_path: dir.join("cache.jsonl"),
        pool_size: Some(workers),
        queue_depth: 512,
        queue_timeout_ms: 60_000,
        ..ServiceConfig::default()
    };
    c.voices.insert("einstein".into(), VoiceConfig { backend, cmudict: None, custom_lexicon: None });
    c
}

pub async fn start_service(config: ServiceConfig, hits: Arc<AtomicUsize>) -> (RunningServer, Arc<TtsService>) {
    start_service_at("127.0.0.1:0", config, hits).await
}

pub async fn start_service_at(
    addr: &str,
    mut config: ServiceConfig,
    hits: Arc<AtomicUsize>,
) -> (RunningServer, Arc<TtsService>) {
    let listener = TcpListener::bind(addr).await.unwrap();
    config.base_url = format!("http://{}", listener.local_addr().unwrap());
    let svc = Arc::new(TtsService::new(&config).unwrap());
    let counted = router(svc.clone()).layer(middleware::from_fn(move |req: Request, next: Next| {
        let hits = hits.clone();
        async move {
            hits.fetch_add(1, Ordering::SeqCst);
            next.run(req).await
        }
    }));
    (spawn(listener, counted).unwrap(), svc)
}

pub fn write_keystore(path: &Path) {
    let line =
        |secret: &str, label: &str, enabled: bool| format!("{}\t{label}\t{enabled}\n", hex::encode(hash_key(secret)));
    let text =
        format!("key_hash\tlabel\tenabled\n{}{}", line(VALID_KEY, "demo", true), line(DISABLED_KEY, "old", false));
    std::fs::write(path, text).unwrap();
}

pub async fn start_gateway(upstream: &str, dir: &Path) -> String {
    let keys = dir.join("keys.tsv");
    write_keystore(&keys);
    let gw = Arc::new(Gateway::new(&GatewayConfig::for_upstream(upstream, &keys)).unwrap());
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let app = app(gw, None);
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    format!("http://{addr}")
}

pub async fn start_stack(dir: &Path, backend: Backend, workers: usize) -> Stack {
    let upstream_hits = Arc::new(AtomicUsize::new(0));
    let (service, svc) = start_service(service_config(dir, backend, workers), upstream_hits.clone()).await;
    let gateway = start_gateway(&service.url(), dir).await;
    Stack { gateway, service, svc, upstream_hits }
}
