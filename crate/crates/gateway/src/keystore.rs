//! API-key records loaded from a TSV file: `key_hash<TAB>label<TAB>enabled`.

use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use sha2::{Digest, Sha256};
use subtle::ConstantTimeEq;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KeystoreError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiKeyRecord {
    /// SHA-256 of the secret.
    pub key_hash: [u8; 32],
    pub label: String,
    pub enabled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Deny {
    #[error("missing api key")]
    Missing,
    #[error("unknown api key")]
    Unknown,
    #[error("api key is disabled")]
    Disabled,
}

impl Deny {
    pub fn status(self) -> u16 {
        match self {
            Deny::Missing => 401,
            Deny::Unknown | Deny::Disabled => 403,
        }
    }
}

pub fn hash_key(secret: &str) -> [u8; 32] {
    Sha256::digest(secret.as_bytes()).into()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Keystore {
    records: Vec<ApiKeyRecord>,
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}

impl Keystore {
    /// Blank lines and `#` comments are skipped, as is a literal header row.
    pub fn parse(text: &str) -> Result<Self, KeystoreError> {
        let mut records: Vec<ApiKeyRecord> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.trim_end_matches('\r');
            if l.trim().is_empty() || l.trim_start().starts_with('#') {
                continue;
            }
            let err = |message: String| KeystoreError::Parse { line, message };
            let fields: Vec<&str> = l.split('\t').collect();
            if fields.first() == Some(&"key_hash") {
                continue;
            }
            let [hash, label, enabled] = fields[..] else {
                return Err(err(format!("expected 3 tab-separated fields, found {}", fields.len())));
            };
            let mut key_hash = [0u8; 32];
            if hash.len() != 64 || hex::decode_to_slice(hash.to_ascii_lowercase(), &mut key_hash).is_err() {
                return Err(err("key_hash must be 64 hex digits".into()));
            }
            let enabled = parse_bool(enabled.trim()).ok_or_else(|| err(format!("bad enabled flag {enabled:?}")))?;
            if records.iter().any(|r| r.key_hash == key_hash) {
                return Err(err("duplicate key_hash".into()));
            }
            records.push(ApiKeyRecord { key_hash, label: label.trim().to_owned(), enabled });
        }
        Ok(Self { records })
    }

    pub fn load(path: &Path) -> Result<Self, KeystoreError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| KeystoreError::Io { path: path.to_owned(), source })?;
        Self::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Returns the matching record's label. Every record's hash is compared in
    /// constant time; the loop does not stop at the first match.
    pub fn authenticate(&self, presented: Option<&str>) -> Result<&str, Deny> {
        let presented = presented.filter(|k| !k.is_empty()).ok_or(Deny::Missing)?;
        let digest = hash_key(presented);
        let mut found = None;
        for r in &self.records {
            if bool::from(r.key_hash.ct_eq(&digest)) {
                found = Some(r);
            }
        }
        match found {
            Some(r) if r.enabled => Ok(&r.label),
            Some(_) => Err(Deny::Disabled),
            None => Err(Deny::Unknown),
        }
    }
}

/// The live key set behind a lock. Readers take an `Arc` snapshot, so a
/// reload never affects requests already being authenticated.
#[derive(Debug)]
pub struct SharedKeystore {
    path: PathBuf,
    current: RwLock<Arc<Keystore>>,
}

impl SharedKeystore {
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, KeystoreError> {
        let path = path.into();
        let ks = Keystore::load(&path)?;
        Ok(Self { path, current: RwLock::new(Arc::new(ks)) })
    }

    pub fn snapshot(&self) -> Arc<Keystore> {
        self.current.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Re-reads the file. On error the previous key set stays active.
    pub fn reload(&self) -> Result<usize, KeystoreError> {
        let ks = Keystore::load(&self.path)?;
        let n = ks.len();
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(ks);
        Ok(n)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(secret: &str, label: &str, enabled: bool) -> String {
        format!("{}\t{label}\t{enabled}\n", hex::encode(hash_key(secret)))
    }

    #[test]
    fn auth_decisions() {
        let text = format!(
            "key_hash\tlabel\tenabled\n# demo keys\n{}{}",
            line("good", "demo", true),
            line("old", "retired", false)
        );
        let ks = Keystore::parse(&text).unwrap();
        assert_eq!(ks.len(), 2);
        assert_eq!(ks.authenticate(Some("good")), Ok("demo"));
        assert_eq!(ks.authenticate(None), Err(Deny::Missing));
        assert_eq!(ks.authenticate(Some("")), Err(Deny::Missing));
        assert_eq!(ks.authenticate(Some("old")), Err(Deny::Disabled));
        assert_eq!(ks.authenticate(Some("guess")), Err(Deny::Unknown));
        assert_eq!(Deny::Missing.status(), 401);
        assert_eq!(Deny::Disabled.status(), 403);
    }

    #[test]
    fn known_hash() {
        // echo -n test | sha256sum
        assert_eq!(hex::encode(hash_key("test")), "9f86d081884c7d659a2feaa0c55ad015a3bf4f1b2b0b822cd15d6c15b0f00a08");
    }

    #[test]
    fn malformed_files() {
        for (text, at) in
            [("abc\tx\ttrue\n", 1), ("\n#c\nzz\n", 3), (&line("a", "l", true).replace("true", "maybe"), 1)]
        {
            match Keystore::parse(text) {
                Err(KeystoreError::Parse { line, .. }) => assert_eq!(line, at, "{text:?}"),
                other => panic!("{other:?}"),
            }
        }
        let dup = format!("{}{}", line("a", "x", true), line("a", "y", false));
        assert!(Keystore::parse(&dup).is_err());
    }

    #[test]
    fn reload_swaps_or_keeps() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("keys.tsv");
        std::fs::write(&path, line("one", "a", true)).unwrap();
        let shared = SharedKeystore::open(&path).unwrap();
        let before = shared.snapshot();

        std::fs::write(&path, format!("{}{}", line("one", "a", false), line("two", "b", true))).unwrap();
        assert_eq!(shared.reload().unwrap(), 2);
        assert_eq!(shared.snapshot().authenticate(Some("two")), Ok("b"));
        assert_eq!(shared.snapshot().authenticate(Some("one")), Err(Deny::Disabled));
        assert_eq!(before.authenticate(Some("one")), Ok("a"));

        std::fs::write(&path, "garbage\n").unwrap();
        assert!(shared.reload().is_err());
        assert_eq!(shared.snapshot().authenticate(Some("two")), Ok("b"));
    }
}
