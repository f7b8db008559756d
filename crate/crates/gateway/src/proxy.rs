//! Authenticate, route, forward.

use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::extract::{Request, State};
use axum::http::{HeaderMap, HeaderName, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;
use tower_http::services::ServeDir;

use crate::config::GatewayConfig;
use crate::keystore::{Deny, SharedKeystore};
use crate::routes::{RouteError, RouteTable};

pub const API_KEY_HEADER: &str = "x-api-key";
pub const REQUEST_ID_HEADER: &str = "x-request-id";
const MAX_BODY_BYTES: usize = 1 << 20;

const HOP_BY_HOP: [&str; 9] = [
    "connection",
    "keep-alive",
    "proxy-authenticate",
    "proxy-authorization",
    "te",
    "trailer",
    "transfer-encoding",
    "upgrade",
    "host",
];

pub fn error_response(status: StatusCode, code: &str, message: &str) -> Response {
    (status, Json(json!({ "error": code, "message": message }))).into_response()
}

pub struct Gateway {
    keys: SharedKeystore,
    routes: RouteTable,
    client: reqwest::Client,
    admin_labels: Vec<String>,
}

impl std::fmt::Debug for Gateway {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Gateway").field("routes", &self.routes).finish()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error(transparent)]
    Keystore(#[from] crate::keystore::KeystoreError),
    #[error(transparent)]
    Routes(#[from] RouteError),
    #[error("building HTTP client: {0}")]
    Client(#[from] reqwest::Error),
}

impl Gateway {
    pub fn new(config: &GatewayConfig) -> Result<Self, GatewayError> {
        let client = reqwest::Client::builder()
            .connect_timeout(config.connect_timeout())
            .timeout(config.request_timeout())
            .redirect(reqwest::redirect::Policy::none())
            .no_proxy()
            .build()?;
        Ok(Self {
            keys: SharedKeystore::open(&config.keystore)?,
            routes: RouteTable::new(config.routes.clone())?,
            client,
            admin_labels: config.admin_labels.clone(),
        })
    }

    pub fn keystore(&self) -> &SharedKeystore {
        &self.keys
    }

    pub fn reload_keystore(&self) -> Result<usize, crate::keystore::KeystoreError> {
        let n = self.keys.reload()?;
        tracing::info!(keys = n, "keystore reloaded");
        Ok(n)
    }

    fn authenticate(&self, headers: &HeaderMap) -> Result<String, Deny> {
        let key = headers.get(API_KEY_HEADER).map(|v| v.to_str().unwrap_or("\u{0}"));
        self.keys.snapshot().authenticate(key).map(str::to_owned)
    }
}

fn deny_response(d: Deny) -> Response {
    let status = StatusCode::from_u16(d.status()).unwrap();
    let code = match d {
        Deny::Missing => "missing_api_key",
        Deny::Unknown | Deny::Disabled => "forbidden",
    };
    error_response(status, code, &d.to_string())
}

pub fn app(gw: Arc<Gateway>, demo_dir: Option<&std::path::Path>) -> Router {
    let mut router =
        Router::new().route("/healthz", get(|| async { "ok" })).route("/admin/reload-keystore", post(reload));
    if let Some(dir) = demo_dir {
        router = router.nest_service("/demo", ServeDir::new(dir).append_index_html_on_directories(true));
    }
    router.fallback(forward).with_state(gw)
}

async fn reload(State(gw): State<Arc<Gateway>>, headers: HeaderMap) -> Response {
    match gw.authenticate(&headers) {
        Err(d) => deny_response(d),
        Ok(label) if !gw.admin_labels.contains(&label) => {
            error_response(StatusCode::FORBIDDEN, "forbidden", "key is not allowed to administer the gateway")
        }
        Ok(_) => match gw.reload_keystore() {
            Ok(n) => Json(json!({ "keys": n })).into_response(),
            Err(e) => error_response(StatusCode::BAD_REQUEST, "keystore_invalid", &e.to_string()),
        },
    }
}

async fn forward(State(gw): State<Arc<Gateway>>, req: Request) -> Response {
    let (parts, body) = req.into_parts();
    // Deny before routing: unauthenticated callers learn nothing about routes.
    let label = match gw.authenticate(&parts.headers) {
        Ok(l) => l,
        Err(d) => return deny_response(d),
    };
    let path = parts.uri.path();
    let Some(route) = gw.routes.resolve(path) else {
        return error_response(StatusCode::NOT_FOUND, "no_route", "no route for this path");
    };
    let request_id = parts
        .headers
        .get(REQUEST_ID_HEADER)
        .and_then(|v| v.to_str().ok())
        .filter(|v| !v.is_empty())
        .map(str::to_owned)
        .unwrap_or_else(|| uuid::Uuid::new_v4().to_string());
    let target = format!("{}{}", route.upstream, parts.uri.path_and_query().map_or(path, |pq| pq.as_str()));

    let body = match to_bytes(body, MAX_BODY_BYTES).await {
        Ok(b) => b,
        Err(_) => return error_response(StatusCode::PAYLOAD_TOO_LARGE, "payload_too_large", "request body too large"),
    };
    let mut headers = strip_hop_by_hop(&parts.headers);
    headers.remove(axum::http::header::CONTENT_LENGTH);
    headers.insert(HeaderName::from_static(REQUEST_ID_HEADER), HeaderValue::from_str(&request_id).unwrap());

    let sent = gw.client.request(parts.method.clone(), &target).headers(headers).body(body).send().await;
    let upstream = match sent {
        Ok(r) => r,
        Err(e) => {
            let (status, code) = if e.is_connect() {
                (StatusCode::BAD_GATEWAY, "upstream_unreachable")
            } else if e.is_timeout() {
                (StatusCode::GATEWAY_TIMEOUT, "upstream_timeout")
            } else {
                (StatusCode::BAD_GATEWAY, "upstream_unreachable")
            };
            tracing::warn!(request_id, label, %target, error = %e, "upstream failed");
            return error_response(status, code, &e.to_string());
        }
    };
    let status = upstream.status();
    let mut out_headers = strip_hop_by_hop(upstream.headers());
    out_headers.remove(axum::http::header::CONTENT_LENGTH);
    let bytes = match upstream.bytes().await {
        Ok(b) => b,
        Err(e) => {
            let status = if e.is_timeout() { StatusCode::GATEWAY_TIMEOUT } else { StatusCode::BAD_GATEWAY };
            return error_response(status, "upstream_body", &e.to_string());
        }
    };
    tracing::info!(request_id, label, method = %parts.method, path, status = status.as_u16(), "forwarded");
    out_headers.insert(HeaderName::from_static(REQUEST_ID_HEADER), HeaderValue::from_str(&request_id).unwrap());
    let mut res = Response::new(Body::from(bytes));
    *res.status_mut() = status;
    *res.headers_mut() = out_headers;
    res
}

fn strip_hop_by_hop(headers: &HeaderMap) -> HeaderMap {
    let mut out = headers.clone();
    for h in HOP_BY_HOP {
        out.remove(h);
    }
    out
}
