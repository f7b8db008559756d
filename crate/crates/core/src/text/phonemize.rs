//! Normalized text to phoneme sequence.

use std::fmt;

use super::arpabet::Phone;
use super::lexicon::LexiconStack;
use super::normalize::{NormalizedText, TokenKind};

/// Which lexicon layer produced a word's pronunciation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Custom,
    Cmu,
    G2p,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Custom => "custom",
            Source::Cmu => "cmu",
            Source::G2p => "g2p",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitKind {
    Phone,
    WordBoundary,
    Pause,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    Phone(Phone),
    WordBoundary,
    Pause,
}

impl Unit {
    pub fn kind(self) -> UnitKind {
        match self {
            Unit::Phone(_) => UnitKind::Phone,
            Unit::WordBoundary => UnitKind::WordBoundary,
            Unit::Pause => UnitKind::Pause,
        }
    }

    /// ARPAbet symbol for phones, `|` for word boundaries, `_` for pauses.
    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Phone(p) => p.symbol(),
            Unit::WordBoundary => "|",
            Unit::Pause => "_",
        }
    }
}

/// Diagnostics for one resolved word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedWord {
    pub word: String,
    pub source: Source,
    pub phones: Vec<Phone>,
}

/// Phones, word boundaries and pauses.
///
/// Never starts or ends with a word boundary and never holds two adjacent pauses.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PhonemeSequence {
    units: Vec<Unit>,
    words: Vec<ResolvedWord>,
}

impl PhonemeSequence {
    /// Builds a sequence from raw units, enforcing the boundary and pause invariants.
    pub fn from_units(units: impl IntoIterator<Item = Unit>) -> Self {
        let mut seq = Self::default();
        for u in units {
            seq.push(u);
        }
        seq.finish();
        seq
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    pub fn words(&self) -> &[ResolvedWord] {
        &self.words
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    fn push(&mut self, unit: Unit) {
        match unit {
            Unit::Phone(_) => self.units.push(unit),
            Unit::WordBoundary => {
                if matches!(self.units.last(), Some(Unit::Phone(_))) {
                    self.units.push(unit);
                }
            }
            Unit::Pause => match self.units.last() {
                Some(Unit::Pause) => {}
                None => self.units.push(unit),
                Some(Unit::WordBoundary) => *self.units.last_mut().unwrap() = Unit::Pause,
                Some(Unit::Phone(_)) => self.units.push(unit),
            },
        }
    }

    fn finish(&mut self) {
        if self.units.last() == Some(&Unit::WordBoundary) {
            self.units.pop();
        }
    }
}

impl fmt::Display for PhonemeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, u) in self.units.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(u.symbol())?;
        }
        Ok(())
    }
}

/// Resolves every word through the lexicon stack and lays out boundaries and pauses.
///
/// All retained punctuation marks map to the single pause class.
pub fn phonemize(text: &NormalizedText, lex: &LexiconStack) -> PhonemeSequence {
    let mut seq = PhonemeSequence::default();
    for token in text.tokens() {
        match token.kind {
            TokenKind::Word => {
                let (phones, source) = lex.lookup(&token.surface);
                seq.push(Unit::WordBoundary);
                for &p in &phones {
                    seq.push(Unit::Phone(p));
                }
                seq.words.push(ResolvedWord { word: token.surface.clone(), source, phones });
            }
            // leading punctuation has nothing to pause after
            TokenKind::Punctuation if seq.words.is_empty() => {}
            TokenKind::Punctuation => seq.push(Unit::Pause),
        }
    }
    seq.finish();
    seq
}
