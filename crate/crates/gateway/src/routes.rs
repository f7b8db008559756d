use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub prefix: String,
    /// Base URL requests are forwarded to; the full original path is appended.
    pub upstream: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RouteError {
    #[error("duplicate route prefix {0:?}")]
    Duplicate(String),
    #[error("route prefix {0:?} must start with '/'")]
    BadPrefix(String),
}

/// Longest-prefix routing table.
#[derive(Debug, Clone)]
pub struct RouteTable {
    routes: Vec<Route>,
}

impl RouteTable {
    pub fn new(mut routes: Vec<Route>) -> Result<Self, RouteError> {
        for (i, r) in routes.iter().enumerate() {
            if !r.prefix.starts_with('/') {
                return Err(RouteError::BadPrefix(r.prefix.clone()));
            }
            if routes[..i].iter().any(|o| o.prefix == r.prefix) {
                return Err(RouteError::Duplicate(r.prefix.clone()));
            }
        }
        routes.sort_by_key(|r| std::cmp::Reverse(r.prefix.len()));
        for r in &mut routes {
            r.upstream = r.upstream.trim_end_matches('/').to_owned();
        }
        Ok(Self { routes })
    }

    pub fn resolve(&self, path: &str) -> Option<&Route> {
        self.routes.iter().find(|r| path.starts_with(&r.prefix))
    }

    pub fn routes(&self) -> &[Route] {
        &self.routes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn route(prefix: &str, upstream: &str) -> Route {
        Route { prefix: prefix.into(), upstream: upstream.into() }
    }

    #[test]
    fn longest_prefix_wins() {
        let t = RouteTable::new(vec![
            route("/v1/", "http://a/"),
            route("/v1/tts/", "http://b"),
            route("/audio/", "http://c"),
        ])
        .unwrap();
        assert_eq!(t.resolve("/v1/tts/sync").unwrap().upstream, "http://b");
        assert_eq!(t.resolve("/v1/other").unwrap().upstream, "http://a");
        assert_eq!(t.resolve("/audio/x/y.wav").unwrap().upstream, "http://c");
        assert!(t.resolve("/nope").is_none());
        assert!(t.resolve("/v1").is_none());
    }

    #[test]
    fn rejects_bad_tables() {
        assert_eq!(
            RouteTable::new(vec![route("/a/", "x"), route("/a/", "y")]).unwrap_err(),
            RouteError::Duplicate("/a/".into())
        );
        assert!(RouteTable::new(vec![route("a/", "x")]).is_err());
    }
}
