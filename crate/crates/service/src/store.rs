//! Audio object storage.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::key::CacheKey;

const ENOSPC: i32 = 28;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("object storage is full")]
    StorageFull,
    #[error("object storage: {0}")]
    Io(#[from] io::Error),
}

fn classify(e: io::Error) -> StoreError {
    if e.kind() == io::ErrorKind::StorageFull || e.raw_os_error() == Some(ENOSPC) {
        StoreError::StorageFull
    } else {
        StoreError::Io(e)
    }
}

/// Object name for `key`: the first 16 hex digits plus `.wav`.
pub fn object_name(key: &CacheKey) -> String {
    format!("{}.wav", key.short_hex())
}

pub fn valid_object_name(name: &str) -> bool {
    name.strip_suffix(".wav")
        .is_some_and(|stem| stem.len() == 16 && stem.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')))
}

/// Content-addressed audio store. Voice ids reaching a store have already
/// been checked against the voice registry.
pub trait ObjectStore: Send + Sync {
    /// Stores `bytes` and returns the public URL. Readers never observe a
    /// partially written object.
    fn put(&self, voice: &str, key: &CacheKey, bytes: &[u8]) -> Result<String, StoreError>;

    /// Reads an object by name; `None` when absent or the name is malformed.
    fn get(&self, voice: &str, name: &str) -> Result<Option<Vec<u8>>, StoreError>;

    fn url(&self, voice: &str, key: &CacheKey) -> String;
}

/// Objects under `{root}/audio/{voice}/{hex16}.wav`, written via temp file and rename.
#[derive(Debug)]
pub struct FsObjectStore {
    root: PathBuf,
    base_url: String,
    seq: AtomicU64,
}

impl FsObjectStore {
    pub fn new(root: impl Into<PathBuf>, base_url: &str) -> io::Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(root.join("audio"))?;
        Ok(Self { root, base_url: base_url.trim_end_matches('/').to_owned(), seq: AtomicU64::new(0) })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_of(&self, voice: &str, name: &str) -> PathBuf {
        self.root.join("audio").join(voice).join(name)
    }
}

impl ObjectStore for FsObjectStore {
    fn put(&self, voice: &str, key: &CacheKey, bytes: &[u8]) -> Result<String, StoreError> {
        let name = object_name(key);
        let dir = self.root.join("audio").join(voice);
        std::fs::create_dir_all(&dir).map_err(classify)?;
        let tmp = dir.join(format!(".{name}.{}.{}.tmp", std::process::id(), self.seq.fetch_add(1, Ordering::Relaxed)));
        let write = || -> io::Result<()> {
            let mut f = std::fs::File::create(&tmp)?;
            f.write_all(bytes)?;
            f.sync_all()?;
            std::fs::rename(&tmp, dir.join(&name))
        };
        if let Err(e) = write() {
            let _ = std::fs::remove_file(&tmp);
            return Err(classify(e));
        }
        Ok(self.url(voice, key))
    }

    fn get(&self, voice: &str, name: &str) -> Result<Option<Vec<u8>>, StoreError> {
        if !valid_object_name(name) {
            return Ok(None);
        }
        match std::fs::read(self.path_of(voice, name)) {
            Ok(b) => Ok(Some(b)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(StoreError::Io(e)),
        }
    }

    fn url(&self, voice: &str, key: &CacheKey) -> String {
        format!("{}/audio/{voice}/{}", self.base_url, object_name(key))
    }
}
