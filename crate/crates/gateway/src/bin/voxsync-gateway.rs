use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use clap::Parser;
use tracing_subscriber::EnvFilter;
use voxsync_gateway::{app, Gateway, GatewayConfig};

/// API-key gateway for the voxsync TTS service.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .init();
    let args = Args::parse();
    let config = GatewayConfig::load(&args.config)?;
    let gw = Arc::new(Gateway::new(&config)?);
    tracing::info!(listen = %config.listen, keys = gw.keystore().snapshot().len(), "starting gateway");

    #[cfg(unix)]
    {
        use tokio::signal::unix::{signal, SignalKind};
        let gw = gw.clone();
        let mut hup = signal(SignalKind::hangup())?;
        tokio::spawn(async move {
            while hup.recv().await.is_some() {
                if let Err(e) = gw.reload_keystore() {
                    tracing::error!(error = %e, "keystore reload rejected, keeping previous keys");
                }
            }
        });
    }

    let listener =
        tokio::net::TcpListener::bind(config.listen).await.with_context(|| format!("binding {}", config.listen))?;
    axum::serve(listener, app(gw, config.demo_dir.as_deref()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
