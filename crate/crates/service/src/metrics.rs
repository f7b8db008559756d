//! Counters and a latency histogram, rendered as `name value` lines.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;

use parking_lot::Mutex;

/// Upper bucket bounds in milliseconds; a final `+Inf` bucket follows.
pub const LATENCY_BUCKETS_MS: [u64; 9] = [1, 5, 10, 25, 50, 100, 250, 500, 1000];

#[derive(Debug, Default)]
pub struct Metrics {
    requests: AtomicU64,
    cache_hits: AtomicU64,
    synth: AtomicU64,
    errors: Mutex<BTreeMap<&'static str, u64>>,
    /// Per-bucket counts, not cumulative: they sum to the request count.
    latency: [AtomicU64; LATENCY_BUCKETS_MS.len() + 1],
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Snapshot {
    pub requests_total: u64,
    pub cache_hits_total: u64,
    pub synth_total: u64,
    pub errors_total: BTreeMap<String, u64>,
    pub latency_buckets: Vec<u64>,
}

impl Snapshot {
    pub fn errors(&self) -> u64 {
        self.errors_total.values().sum()
    }
}

impl Metrics {
    /// Error codes pre-registered so a fresh snapshot lists them at zero.
    pub fn with_error_codes(codes: &[&'static str]) -> Self {
        let m = Self::default();
        m.errors.lock().extend(codes.iter().map(|c| (*c, 0)));
        m
    }

    pub fn request(&self) {
        self.requests.fetch_add(1, Ordering::Relaxed);
    }

    pub fn cache_hit(&self) {
        self.cache_hits.fetch_add(1, Ordering::Relaxed);
    }

    pub fn synthesized(&self) {
        self.synth.fetch_add(1, Ordering::Relaxed);
    }

    pub fn error(&self, code: &'static str) {
        *self.errors.lock().entry(code).or_default() += 1;
    }

    pub fn observe(&self, latency: Duration) {
        let ms = latency.as_secs_f64() * 1000.0;
        let i = LATENCY_BUCKETS_MS.iter().position(|&b| ms <= b as f64).unwrap_or(LATENCY_BUCKETS_MS.len());
        self.latency[i].fetch_add(1, Ordering::Relaxed);
    }

    pub fn synth_total(&self) -> u64 {
        self.synth.load(Ordering::Relaxed)
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            requests_total: self.requests.load(Ordering::Relaxed),
            cache_hits_total: self.cache_hits.load(Ordering::Relaxed),
            synth_total: self.synth.load(Ordering::Relaxed),
            errors_total: self.errors.lock().iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            latency_buckets: self.latency.iter().map(|c| c.load(Ordering::Relaxed)).collect(),
        }
    }

    pub fn render(&self) -> String {
        let s = self.snapshot();
        let mut out = String::new();
        let _ = writeln!(out, "requests_total {}", s.requests_total);
        let _ = writeln!(out, "cache_hits_total {}", s.cache_hits_total);
        let _ = writeln!(out, "synth_total {}", s.synth_total);
        for (code, n) in &s.errors_total {
            let _ = writeln!(out, "errors_total{{code=\"{code}\"}} {n}");
        }
        for (i, n) in s.latency_buckets.iter().enumerate() {
            match LATENCY_BUCKETS_MS.get(i) {
                Some(b) => writeln!(out, "latency_ms_bucket{{le=\"{b}\"}} {n}"),
                None => writeln!(out, "latency_ms_bucket{{le=\"+Inf\"}} {n}"),
            }
            .unwrap();
        }
        out
    }
}

/// Parses [`Metrics::render`] output back into `name → value`.
pub fn parse_metrics(text: &str) -> BTreeMap<String, u64> {
    text.lines().filter_map(|l| l.rsplit_once(' ')).filter_map(|(k, v)| Some((k.to_owned(), v.parse().ok()?))).collect()
}
