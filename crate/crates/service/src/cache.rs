//! URL cache with an append-only JSON-lines journal.
//!
//! Every `put` appends one line before the entry becomes visible, so a
//! restart replays the journal and sees every entry a client was told about.

use std::collections::{HashMap, VecDeque};
use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::key::CacheKey;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub url: String,
    /// Unix time in milliseconds.
    pub created_at: u64,
    pub audio_bytes: u64,
    pub audio_duration_ms: u64,
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache journal {path} is corrupt at byte offset {offset}: {message}")]
    JournalCorrupt { path: PathBuf, offset: u64, message: String },
    #[error("cache journal {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Default)]
struct Entries {
    map: HashMap<CacheKey, CacheEntry>,
    /// Insertion order, for the entry cap.
    order: VecDeque<CacheKey>,
}

impl Entries {
    fn insert(&mut self, key: CacheKey, entry: CacheEntry, cap: Option<usize>) {
        if self.map.insert(key, entry).is_none() {
            self.order.push_back(key);
        }
        if let Some(cap) = cap {
            while self.map.len() > cap {
                let Some(old) = self.order.pop_front() else { break };
                self.map.remove(&old);
            }
        }
    }
}

pub struct Cache {
    entries: RwLock<Entries>,
    journal: Mutex<File>,
    path: PathBuf,
    max_entries: Option<usize>,
}

impl std::fmt::Debug for Cache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cache").field("path", &self.path).field("len", &self.len()).finish()
    }
}

impl Cache {
    /// Opens or creates the journal at `path` and replays it.
    ///
    /// A final line without a trailing newline is a torn append from a crash:
    /// it is dropped and truncated away. Any other unparsable line is an error.
    pub fn open(path: &Path, max_entries: Option<usize>) -> Result<Self, CacheError> {
        let io_err = |source| CacheError::Io { path: path.to_owned(), source };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io_err)?;
        }
        let data = match std::fs::read(path) {
            Ok(d) => d,
            Err(e) if e.kind() == io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(io_err(e)),
        };

        let mut entries = Entries::default();
        let mut offset = 0usize;
        let mut valid_len = 0usize;
        let mut needs_newline = false;
        while offset < data.len() {
            let (line, next, complete) = match data[offset..].iter().position(|&b| b == b'\n') {
                Some(i) => (&data[offset..offset + i], offset + i + 1, true),
                None => (&data[offset..], data.len(), false),
            };
            if !line.iter().all(u8::is_ascii_whitespace) {
                match parse_line(line) {
                    Ok((key, entry)) => {
                        entries.insert(key, entry, max_entries);
                        if !complete {
                            valid_len = data.len();
                            needs_newline = true;
                        }
                    }
                    Err(_) if !complete => break,
                    Err(message) => {
                        return Err(CacheError::JournalCorrupt {
                            path: path.to_owned(),
                            offset: offset as u64,
                            message,
                        })
                    }
                }
            }
            if complete {
                valid_len = next;
            }
            offset = next;
        }

        let mut file = OpenOptions::new().create(true).append(true).open(path).map_err(io_err)?;
        if valid_len < data.len() {
            file.set_len(valid_len as u64).map_err(io_err)?;
        }
        if needs_newline {
            file.write_all(b"\n").map_err(io_err)?;
        }
        file.flush().map_err(io_err)?;
        Ok(Self { entries: RwLock::new(entries), journal: Mutex::new(file), path: path.to_owned(), max_entries })
    }

    pub fn get(&self, key: &CacheKey) -> Option<CacheEntry> {
        self.entries.read().map.get(key).cloned()
    }

    /// Appends to the journal, then publishes the entry.
    pub fn put(&self, key: CacheKey, entry: CacheEntry) -> Result<(), CacheError> {
        let mut line = serde_json::to_vec(&entry).expect("cache entry serializes");
        line.push(b'\n');
        {
            let mut journal = self.journal.lock();
            journal
                .write_all(&line)
                .and_then(|_| journal.flush())
                .map_err(|source| CacheError::Io { path: self.path.clone(), source })?;
        }
        self.entries.write().insert(key, entry, self.max_entries);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.read().map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

fn parse_line(line: &[u8]) -> Result<(CacheKey, CacheEntry), String> {
    let entry: CacheEntry = serde_json::from_slice(line).map_err(|e| e.to_string())?;
    let key = CacheKey::from_hex(&entry.key).ok_or_else(|| format!("bad key {:?}", entry.key))?;
    Ok((key, entry))
}
