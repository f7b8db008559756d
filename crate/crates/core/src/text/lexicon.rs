//! Pronunciation lexicon layers and the three-layer lookup stack.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::arpabet::Phone;
use super::g2p::RuleTable;
use super::phonemize::Source;

pub type Pronunciation = Vec<Phone>;

const BUILTIN_CMU: &str = include_str!("../../data/cmudict-subset.dict");
const BUILTIN_CUSTOM: &str = include_str!("../../data/custom_lexicon.tsv");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: invalid phoneme {symbol:?}")]
    InvalidPhoneme { line: usize, symbol: String },
}

fn read(path: &Path) -> Result<String, LexiconError> {
    std::fs::read_to_string(path).map_err(|source| LexiconError::Io { path: path.to_path_buf(), source })
}

fn is_lookup_word(w: &str) -> bool {
    !w.is_empty() && w.bytes().all(|b| b.is_ascii_lowercase() || b == b'\'')
}

/// One word → pronunciation map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LexiconLayer {
    entries: HashMap<String, Pronunciation>,
}

impl LexiconLayer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[Phone]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn insert(&mut self, word: impl Into<String>, pron: Pronunciation) {
        self.entries.insert(word.into(), pron);
    }

    pub fn load_cmu_dict(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        Self::parse_cmu_dict(&read(path.as_ref())?)
    }

    /// Parses cmudict plain text: `WORD  PH PH PH`, `;;;` comments, `WORD(2)` variants.
    ///
    /// Only the first pronunciation of each word is kept. Entries whose
    /// headword can never be produced by normalization (`!EXCLAMATION-POINT`)
    /// are validated but not stored.
    pub fn parse_cmu_dict(text: &str) -> Result<Self, LexiconError> {
        let mut layer = Self::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with(";;;") {
                continue;
            }
            let mut fields = line.split_whitespace();
            let head = fields.next().expect("non-empty line has a first field");
            let phones = fields
                .map(|sym| {
                    sym.parse::<Phone>().map_err(|e| LexiconError::Parse {
                        line: line_no,
                        message: format!("malformed pronunciation symbol {:?}", e.0),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if phones.is_empty() {
                return Err(LexiconError::Parse { line: line_no, message: format!("no pronunciation for {head:?}") });
            }
            if head.ends_with(')') && head.contains('(') {
                continue;
            }
            let word = head.to_lowercase();
            if is_lookup_word(&word) {
                layer.entries.entry(word).or_insert(phones);
            }
        }
        Ok(layer)
    }

    pub fn load_custom_lexicon(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        Self::parse_custom_lexicon(&read(path.as_ref())?)
    }

    /// Parses `word<TAB>PH PH ...` lines with `#` comments. Later lines win.
    pub fn parse_custom_lexicon(text: &str) -> Result<Self, LexiconError> {
        let mut layer = Self::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let Some((word, pron)) = line.split_once('\t') else {
                return Err(LexiconError::Parse { line: line_no, message: "expected word<TAB>pronunciation".into() });
            };
            let word = word.trim().to_lowercase();
            if !is_lookup_word(&word) {
                return Err(LexiconError::Parse {
                    line: line_no,
                    message: format!("word {word:?} must match [a-z']+"),
                });
            }
            let phones = pron
                .split_whitespace()
                .map(|sym| {
                    sym.parse::<Phone>()
                        .map_err(|_| LexiconError::InvalidPhoneme { line: line_no, symbol: sym.to_string() })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if phones.is_empty() {
                return Err(LexiconError::Parse { line: line_no, message: "empty pronunciation".into() });
            }
            layer.entries.insert(word, phones);
        }
        Ok(layer)
    }
}

/// Custom lexicon, CMU dictionary and rule fallback, consulted in that order.
///
/// Immutable once built; share it behind an `Arc` across request handlers.
#[derive(Debug, Clone)]
pub struct LexiconStack {
    custom: LexiconLayer,
    cmu: LexiconLayer,
    g2p: RuleTable,
}

impl LexiconStack {
    pub fn new(custom: LexiconLayer, cmu: LexiconLayer, g2p: RuleTable) -> Self {
        Self { custom, cmu, g2p }
    }

    /// The lexicons and rule table shipped with the crate.
    pub fn builtin() -> Self {
        Self::new(
            LexiconLayer::parse_custom_lexicon(BUILTIN_CUSTOM).expect("bundled custom lexicon is valid"),
            LexiconLayer::parse_cmu_dict(BUILTIN_CMU).expect("bundled cmudict subset is valid"),
            RuleTable::builtin(),
        )
    }

    /// Loads from files; `None` selects the bundled layer.
    pub fn from_paths(custom: Option<&Path>, cmu: Option<&Path>) -> Result<Self, LexiconError> {
        let custom = match custom {
            Some(p) => LexiconLayer::load_custom_lexicon(p)?,
            None => LexiconLayer::parse_custom_lexicon(BUILTIN_CUSTOM)?,
        };
        let cmu = match cmu {
            Some(p) => LexiconLayer::load_cmu_dict(p)?,
            None => LexiconLayer::parse_cmu_dict(BUILTIN_CMU)?,
        };
        Ok(Self::new(custom, cmu, RuleTable::builtin()))
    }

    pub fn custom(&self) -> &LexiconLayer {
        &self.custom
    }

    pub fn cmu(&self) -> &LexiconLayer {
        &self.cmu
    }

    pub fn rules(&self) -> &RuleTable {
        &self.g2p
    }

    /// First hit wins: custom, then CMU, then the rule fallback.
    pub fn lookup(&self, word: &str) -> (Pronunciation, Source) {
        if let Some(p) = self.custom.get(word) {
            (p.to_vec(), Source::Custom)
        } else if let Some(p) = self.cmu.get(word) {
            (p.to_vec(), Source::Cmu)
        } else {
            (self.g2p.convert(word), Source::G2p)
        }
    }
}
