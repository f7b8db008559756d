//! HTTP surface of the service.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;
use tokio::net::TcpListener;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

use crate::service::{ServiceError, SynthesisRequest, TtsService};

pub const REQUEST_ID_HEADER: &str = "x-request-id";

pub fn error_response(status: u16, code: &str, message: &str) -> Response {
    let status = StatusCode::from_u16(status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, Json(json!({ "error": code, "message": message }))).into_response()
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        error_response(self.status(), self.code(), &self.to_string())
    }
}

pub fn router(svc: Arc<TtsService>) -> Router {
    Router::new()
        .route("/v1/tts/sync", post(tts_sync))
        .route("/audio/{voice}/{file}", get(audio))
        .route("/healthz", get(|| async { "ok" }))
        .route("/metrics", get(metrics))
        .fallback(|| async { error_response(404, "not_found", "no such endpoint") })
        .with_state(svc)
}

async fn tts_sync(State(svc): State<Arc<TtsService>>, headers: HeaderMap, body: Bytes) -> Response {
    let req: SynthesisRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => {
            // Malformed bodies still count as requests.
            let err = ServiceError::BadRequest(format!("invalid request body: {e}"));
            svc.metrics().request();
            svc.metrics().error(err.code());
            svc.metrics().observe(std::time::Duration::ZERO);
            return err.into_response();
        }
    };
    let request_id = headers.get(REQUEST_ID_HEADER).and_then(|v| v.to_str().ok()).unwrap_or("-").to_owned();
    let result = svc.synthesize(&req).await;
    match result {
        Ok(res) => {
            tracing::info!(request_id, voice = %req.voice, cached = res.cached, synthesis_ms = res.synthesis_ms, "tts");
            Json(res).into_response()
        }
        Err(e) => {
            tracing::warn!(request_id, voice = %req.voice, error = %e, "tts failed");
            e.into_response()
        }
    }
}

async fn audio(State(svc): State<Arc<TtsService>>, Path((voice, file)): Path<(String, String)>) -> Response {
    if !svc.has_voice(&voice) {
        return error_response(404, "not_found", "no such object");
    }
    let fetch = {
        let svc = svc.clone();
        tokio::task::spawn_blocking(move || svc.store().get(&voice, &file))
    };
    match fetch.await {
        Ok(Ok(Some(bytes))) => ([(header::CONTENT_TYPE, "audio/wav")], bytes).into_response(),
        Ok(Ok(None)) => error_response(404, "not_found", "no such object"),
        Ok(Err(e)) => ServiceError::from(e).into_response(),
        Err(e) => ServiceError::Internal(e.to_string()).into_response(),
    }
}

async fn metrics(State(svc): State<Arc<TtsService>>) -> Response {
    ([(header::CONTENT_TYPE, "text/plain; version=0.0.4")], svc.metrics().render()).into_response()
}

/// A server running on a background task.
pub struct RunningServer {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    task: JoinHandle<std::io::Result<()>>,
}

impl RunningServer {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Stops accepting connections and waits for in-flight requests.
    pub async fn shutdown(mut self) -> std::io::Result<()> {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        self.task.await.map_err(std::io::Error::other)?
    }
}

/// Serves `app` on an already bound listener until [`RunningServer::shutdown`].
pub fn spawn(listener: TcpListener, app: Router) -> std::io::Result<RunningServer> {
    let addr = listener.local_addr()?;
    let (tx, rx) = oneshot::channel();
    let task = tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = rx.await;
            })
            .await
    });
    Ok(RunningServer { addr, shutdown: Some(tx), task })
}
