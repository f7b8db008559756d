use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use clap::Parser;
use tracing_subscriber::EnvFilter;
use voxsync_service::{router, ServiceConfig, TtsService};

/// Synchronous TTS service.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// TOML configuration file. `VOXSYNC_*` variables override its values.
    #[arg(long)]
    config: PathBuf,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .init();
    let args = Args::parse();
    let config = ServiceConfig::load(&args.config)?;
    let svc = Arc::new(TtsService::new(&config)?);
    tracing::info!(
        listen = %config.listen,
        workers = config.workers(),
        voices = ?svc.voices().keys().collect::<Vec<_>>(),
        cached = svc.cache().len(),
        "starting"
    );
    let listener =
        tokio::net::TcpListener::bind(config.listen).await.with_context(|| format!("binding {}", config.listen))?;
    axum::serve(listener, router(svc))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
