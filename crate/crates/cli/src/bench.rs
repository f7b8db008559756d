//! Closed-loop load generator for the synchronous synthesis endpoint.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::Context;
use serde::{Deserialize, Serialize};

pub const BUNDLED_CORPUS: &str = include_str!("../data/bench_corpus.txt");

/// Non-empty, non-comment lines of a corpus file, or the bundled corpus.
pub fn load_corpus(path: Option<&Path>) -> anyhow::Result<Vec<String>> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => BUNDLED_CORPUS.to_owned(),
    };
    let lines: Vec<String> =
        text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::to_owned).collect();
    anyhow::ensure!(!lines.is_empty(), "corpus is empty");
    Ok(lines)
}

/// `n` distinct texts: corpus lines cycled, each tagged with `nonce` and its index.
pub fn unique_texts(corpus: &[String], n: usize, nonce: &str) -> Vec<String> {
    (0..n).map(|i| format!("{} [{nonce}-{i}]", corpus[i % corpus.len()])).collect()
}

/// The first corpus line `n` times.
pub fn repeated_texts(corpus: &[String], n: usize) -> Vec<String> {
    vec![corpus[0].clone(); n]
}

#[derive(Debug, Clone)]
pub struct BenchSpec {
    /// Base URL of the gateway or the service.
    pub url: String,
    pub api_key: Option<String>,
    pub voice: String,
    pub concurrency: usize,
    pub texts: Vec<String>,
    pub timeout: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// HTTP status, 0 for transport errors.
    pub status: u16,
    pub cached: Option<bool>,
    pub latency_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Percentiles {
    pub n: usize,
    pub p50: f64,
    pub p95: f64,
    pub p99: f64,
}

/// Nearest-rank percentile of an ascending slice.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

impl Percentiles {
    pub fn of(latencies: impl IntoIterator<Item = f64>) -> Self {
        let mut v: Vec<f64> = latencies.into_iter().collect();
        v.sort_by(f64::total_cmp);
        Self { n: v.len(), p50: percentile(&v, 0.50), p95: percentile(&v, 0.95), p99: percentile(&v, 0.99) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub samples: Vec<Sample>,
    pub elapsed_s: f64,
    pub concurrency: usize,
}

#[derive(Deserialize)]
struct SyncBody {
    cached: bool,
}

impl BenchReport {
    pub fn status_counts(&self) -> BTreeMap<u16, usize> {
        let mut m = BTreeMap::new();
        for s in &self.samples {
            *m.entry(s.status).or_default() += 1;
        }
        m
    }

    pub fn overall(&self) -> Percentiles {
        Percentiles::of(self.samples.iter().filter(|s| s.status == 200).map(|s| s.latency_ms))
    }

    pub fn hits(&self) -> Percentiles {
        Percentiles::of(self.samples.iter().filter(|s| s.cached == Some(true)).map(|s| s.latency_ms))
    }

    pub fn misses(&self) -> Percentiles {
        Percentiles::of(self.samples.iter().filter(|s| s.cached == Some(false)).map(|s| s.latency_ms))
    }

    /// Cache hits over successful responses.
    pub fn hit_ratio(&self) -> f64 {
        let ok = self.samples.iter().filter(|s| s.status == 200).count();
        if ok == 0 {
            return 0.0;
        }
        self.samples.iter().filter(|s| s.cached == Some(true)).count() as f64 / ok as f64
    }

    pub fn throughput(&self) -> f64 {
        self.samples.len() as f64 / self.elapsed_s.max(1e-9)
    }

    /// Server errors plus transport failures.
    pub fn failures(&self) -> usize {
        self.samples.iter().filter(|s| s.status == 0 || s.status >= 500).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let statuses: Vec<String> = self.status_counts().iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "requests     {} (concurrency {})", self.samples.len(), self.concurrency);
        let _ = writeln!(out, "status       {}", statuses.join(" "));
        let _ = writeln!(out, "elapsed      {:.3} s", self.elapsed_s);
        let _ = writeln!(out, "throughput   {:.1} req/s", self.throughput());
        let _ = writeln!(out, "hit ratio    {:.3}", self.hit_ratio());
        for (label, p) in [("all", self.overall()), ("miss", self.misses()), ("hit", self.hits())] {
            if p.n > 0 {
                let _ =
                    writeln!(out, "{label:<12} n={} p50={:.1} ms p95={:.1} ms p99={:.1} ms", p.n, p.p50, p.p95, p.p99);
            }
        }
        out
    }
}

async fn one(client: &reqwest::Client, spec: &BenchSpec, text: &str) -> Sample {
    let mut req = client
        .post(format!("{}/v1/tts/sync", spec.url.trim_end_matches('/')))
        .header("content-type", "application/json")
        .body(serde_json::json!({ "text": text, "voice": spec.voice }).to_string());
    if let Some(key) = &spec.api_key {
        req = req.header("x-api-key", key);
    }
    let start = Instant::now();
    let resp = req.send().await;
    let (status, cached) = match resp {
        Ok(r) => {
            let status = r.status().as_u16();
            let cached = match r.bytes().await {
                Ok(body) if status == 200 => serde_json::from_slice::<SyncBody>(&body).ok().map(|b| b.cached),
                _ => None,
            };
            (status, cached)
        }
        Err(_) => (0, None),
    };
    Sample { status, cached, latency_ms: start.elapsed().as_secs_f64() * 1000.0 }
}

/// Sends every text once with `concurrency` closed-loop workers.
pub async fn run_bench(spec: &BenchSpec) -> anyhow::Result<BenchReport> {
    let client = reqwest::Client::builder().no_proxy().timeout(spec.timeout).build()?;
    let spec = Arc::new(spec.clone());
    let next = Arc::new(AtomicUsize::new(0));
    let workers = spec.concurrency.max(1);
    let start = Instant::now();
    let mut handles = Vec::with_capacity(workers);
    for _ in 0..workers {
        let (client, spec, next) = (client.clone(), spec.clone(), next.clone());
        handles.push(tokio::spawn(async move {
            let mut out = Vec::new();
            loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(text) = spec.texts.get(i) else { break };
                out.push((i, one(&client, &spec, text).await));
            }
            out
        }));
    }
    let mut indexed = Vec::with_capacity(spec.texts.len());
    for h in handles {
        indexed.extend(h.await?);
    }
    let elapsed_s = start.elapsed().as_secs_f64();
    indexed.sort_by_key(|(i, _)| *i);
    Ok(BenchReport { samples: indexed.into_iter().map(|(_, s)| s).collect(), elapsed_s, concurrency: workers })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(percentile(&v, 0.5), 50.0);
        assert_eq!(percentile(&v, 0.95), 95.0);
        assert_eq!(percentile(&v, 0.99), 99.0);
        assert_eq!(percentile(&[3.0], 0.5), 3.0);
        assert!(percentile(&[], 0.5).is_nan());
    }

    #[test]
    fn text_modes() {
        let corpus = load_corpus(None).unwrap();
        let u = unique_texts(&corpus, 100, "x");
        let set: std::collections::HashSet<_> = u.iter().collect();
        assert_eq!(set.len(), 100);
        assert!(repeated_texts(&corpus, 5).iter().all(|t| t == &corpus[0]));
    }

    #[test]
    fn bundled_corpus_fits_text_limit() {
        for line in load_corpus(None).unwrap() {
            assert!(voxsync_core::text::normalize_text(&line).is_ok(), "{line}");
        }
    }
}
