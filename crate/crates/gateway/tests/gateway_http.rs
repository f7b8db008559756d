use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::body::Bytes;
use axum::http::{HeaderMap, StatusCode};
use axum::routing::any;
use axum::Router;
use tokio::net::TcpListener;
use voxsync_gateway::{app, hash_key, Gateway, GatewayConfig};

#[derive(Default)]
struct Seen {
    hits: AtomicUsize,
    last: Mutex<Option<(String, HeaderMap, Bytes)>>,
}

async fn serve(router: Router) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, router).await.unwrap() });
    format!("http://{addr}")
}

async fn upstream(seen: Arc<Seen>) -> String {
    let record = move |uri: axum::http::Uri, headers: HeaderMap, body: Bytes| {
        let seen = seen.clone();
        async move {
            seen.hits.fetch_add(1, Ordering::SeqCst);
            *seen.last.lock().unwrap() = Some((uri.to_string(), headers, body.clone()));
            if uri.path() == "/v1/tts/slow" {
                tokio::time::sleep(Duration::from_millis(1500)).await;
            }
            (StatusCode::IM_A_TEAPOT, [("x-upstream", "yes")], [b"echo:".as_slice(), &body].concat())
        }
    };
    serve(Router::new().route("/{*rest}", any(record))).await
}

fn keyline(secret: &str, label: &str, enabled: bool) -> String {
    format!("{}\t{label}\t{enabled}\n", hex::encode(hash_key(secret)))
}

fn write_keys(path: &Path, lines: &[(&str, &str, bool)]) {
    let text: String = lines.iter().map(|(s, l, e)| keyline(s, l, *e)).collect();
    std::fs::write(path, format!("key_hash\tlabel\tenabled\n{text}")).unwrap();
}

async fn gateway(upstream: &str, dir: &Path, tweak: impl FnOnce(&mut GatewayConfig)) -> (String, Arc<Gateway>) {
    let keys = dir.join("keys.tsv");
    if !keys.exists() {
        write_keys(&keys, &[("valid", "demo", true), ("off", "old", false), ("root", "admin", true)]);
    }
    let mut cfg = GatewayConfig::for_upstream(upstream, &keys);
    tweak(&mut cfg);
    let gw = Arc::new(Gateway::new(&cfg).unwrap());
    (serve(app(gw.clone(), cfg.demo_dir.as_deref())).await, gw)
}

async fn call(client: &reqwest::Client, url: String, key: Option<&str>) -> (u16, String) {
    let mut req = client.post(url).body("{\"text\":\"hi\"}");
    if let Some(k) = key {
        req = req.header("x-api-key", k);
    }
    let res = req.send().await.unwrap();
    (res.status().as_u16(), res.text().await.unwrap())
}

#[tokio::test]
async fn auth_matrix_and_no_upstream_contact_on_deny() {
    let dir = tempfile::tempdir().unwrap();
    let seen = Arc::new(Seen::default());
    let (gw, _) = gateway(&upstream(seen.clone()).await, dir.path(), |_| {}).await;
    let client = reqwest::Client::new();
    for path in ["/v1/tts/sync", "/audio/einstein/0123456789abcdef.wav"] {
        for (key, status) in [(None, 401), (Some("wrong"), 403), (Some("off"), 403)] {
            let before = seen.hits.load(Ordering::SeqCst);
            let (s, body) = call(&client, format!("{gw}{path}"), key).await;
            assert_eq!(s, status, "{path} {key:?} {body}");
            assert!(body.contains("\"error\""));
            assert_eq!(seen.hits.load(Ordering::SeqCst), before, "denied request reached upstream");
        }
        let before = seen.hits.load(Ordering::SeqCst);
        let (s, _) = call(&client, format!("{gw}{path}"), Some("valid")).await;
        assert_eq!(s, 418);
        assert_eq!(seen.hits.load(Ordering::SeqCst), before + 1);
    }
    let before = seen.hits.load(Ordering::SeqCst);
    assert_eq!(call(&client, format!("{gw}/nope"), Some("valid")).await.0, 404);
    assert_eq!(call(&client, format!("{gw}/nope"), None).await.0, 401);
    assert_eq!(seen.hits.load(Ordering::SeqCst), before);
    assert_eq!(client.get(format!("{gw}/healthz")).send().await.unwrap().status(), 200);
}

#[tokio::test]
async fn forwards_verbatim_with_request_id() {
    let dir = tempfile::tempdir().unwrap();
    let seen = Arc::new(Seen::default());
    let (gw, _) = gateway(&upstream(seen.clone()).await, dir.path(), |_| {}).await;
    let client = reqwest::Client::new();

    let res = client
        .post(format!("{gw}/v1/tts/sync?x=1"))
        .header("x-api-key", "valid")
        .header("x-custom", "kept")
        .body("payload bytes")
        .send()
        .await
        .unwrap();
    assert_eq!(res.status(), 418);
    assert_eq!(res.headers()["x-upstream"], "yes");
    let rid = res.headers()["x-request-id"].to_str().unwrap().to_owned();
    assert_eq!(res.text().await.unwrap(), "echo:payload bytes");
    let (uri, headers, body) = seen.last.lock().unwrap().clone().unwrap();
    assert_eq!(uri, "/v1/tts/sync?x=1");
    assert_eq!(body.as_ref(), b"payload bytes");
    assert_eq!(headers["x-custom"], "kept");
    let forwarded = headers["x-request-id"].to_str().unwrap();
    assert_eq!(forwarded, rid);
    let parsed = uuid::Uuid::parse_str(forwarded).unwrap();
    assert_eq!(parsed.get_version_num(), 4);

    client
        .post(format!("{gw}/v1/tts/sync"))
        .header("x-api-key", "valid")
        .header("x-request-id", "abc-123")
        .send()
        .await
        .unwrap();
    assert_eq!(seen.last.lock().unwrap().as_ref().unwrap().1["x-request-id"], "abc-123");
}

#[tokio::test]
async fn upstream_failures() {
    let dir = tempfile::tempdir().unwrap();
    let dead = {
        let l = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        format!("http://{}", l.local_addr().unwrap())
    };
    let (gw, _) = gateway(&dead, dir.path(), |_| {}).await;
    let client = reqwest::Client::new();
    let (s, body) = call(&client, format!("{gw}/v1/tts/sync"), Some("valid")).await;
    assert_eq!(s, 502, "{body}");

    let seen = Arc::new(Seen::default());
    let (gw, _) = gateway(&upstream(seen).await, dir.path(), |c| c.request_timeout_ms = 300).await;
    let (s, body) = call(&client, format!("{gw}/v1/tts/slow"), Some("valid")).await;
    assert_eq!(s, 504, "{body}");
}

#[tokio::test]
async fn keystore_reload_via_admin_endpoint() {
    let dir = tempfile::tempdir().unwrap();
    let seen = Arc::new(Seen::default());
    let (gw, _) = gateway(&upstream(seen).await, dir.path(), |_| {}).await;
    let client = reqwest::Client::new();
    let keys = dir.path().join("keys.tsv");
    let reload = |key: &'static str| {
        let (client, gw) = (client.clone(), gw.clone());
        async move {
            let res = client.post(format!("{gw}/admin/reload-keystore")).header("x-api-key", key).send().await.unwrap();
            res.status().as_u16()
        }
    };

    assert_eq!(call(&client, format!("{gw}/v1/tts/sync"), Some("fresh")).await.0, 403);
    write_keys(&keys, &[("fresh", "new", true), ("root", "admin", true)]);
    assert_eq!(reload("valid").await, 403, "non-admin key may not reload");
    assert_eq!(reload("root").await, 200);
    assert_eq!(call(&client, format!("{gw}/v1/tts/sync"), Some("fresh")).await.0, 418);
    assert_eq!(call(&client, format!("{gw}/v1/tts/sync"), Some("valid")).await.0, 403);

    std::fs::write(&keys, "not a keystore\n").unwrap();
    assert_eq!(reload("root").await, 400);
    assert_eq!(call(&client, format!("{gw}/v1/tts/sync"), Some("fresh")).await.0, 418);
}

#[tokio::test]
async fn demo_assets_are_public() {
    let dir = tempfile::tempdir().unwrap();
    let demo = dir.path().join("demo");
    std::fs::create_dir(&demo).unwrap();
    std::fs::write(demo.join("index.html"), "<h1>demo</h1>").unwrap();
    let seen = Arc::new(Seen::default());
    let up = upstream(seen.clone()).await;
    let (gw, _) = gateway(&up, dir.path(), |c| c.demo_dir = Some(demo.clone())).await;
    let res = reqwest::get(format!("{gw}/demo/")).await.unwrap();
    assert_eq!(res.status(), 200);
    assert_eq!(res.text().await.unwrap(), "<h1>demo</h1>");
    assert_eq!(seen.hits.load(Ordering::SeqCst), 0);
}
