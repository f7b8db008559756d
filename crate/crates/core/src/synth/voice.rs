//! A named voice: lexicon stack plus a warm synthesizer.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{FastToneSynth, GlimSynth, SynthError, Synthesizer};
use crate::dsp::Waveform;
use crate::text::{normalize_text, phonemize, LexiconStack, NormalizeError, NormalizedText, PhonemeSequence};
use crate::Exec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    MockFast,
    MockGlim,
}

impl Backend {
    pub const ALL: [Backend; 2] = [Backend::MockFast, Backend::MockGlim];

    pub fn as_str(self) -> &'static str {
        match self {
            Backend::MockFast => "mock_fast",
            Backend::MockGlim => "mock_glim",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Backend::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| format!("unknown backend {s:?} (expected mock_fast or mock_glim)"))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VoiceError {
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Synth(#[from] SynthError),
}

/// Everything produced for one request.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub normalized: NormalizedText,
    pub phonemes: PhonemeSequence,
    pub wave: Waveform,
}

pub struct Voice {
    id: String,
    lexicon: Arc<LexiconStack>,
    synth: Box<dyn Synthesizer>,
}

impl fmt::Debug for Voice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Voice").field("id", &self.id).field("backend", &self.synth.backend()).finish()
    }
}

impl Voice {
    pub fn new(
        id: impl Into<String>,
        backend: Backend,
        lexicon: Arc<LexiconStack>,
        exec: Exec,
    ) -> Result<Self, SynthError> {
        let synth: Box<dyn Synthesizer> = match backend {
            Backend::MockFast => Box::new(FastToneSynth::new()?),
            Backend::MockGlim => Box::new(GlimSynth::new(exec)?),
        };
        Ok(Self::with_synthesizer(id, lexicon, synth))
    }

    pub fn with_synthesizer(id: impl Into<String>, lexicon: Arc<LexiconStack>, synth: Box<dyn Synthesizer>) -> Self {
        Self { id: id.into(), lexicon, synth }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn backend(&self) -> Backend {
        self.synth.backend()
    }

    pub fn lexicon(&self) -> &LexiconStack {
        &self.lexicon
    }

    pub fn phonemize(&self, text: &str) -> Result<(NormalizedText, PhonemeSequence), VoiceError> {
        let normalized = normalize_text(text)?;
        let phonemes = phonemize(&normalized, &self.lexicon);
        Ok((normalized, phonemes))
    }

    pub fn render(&self, text: &str) -> Result<Rendered, VoiceError> {
        let (normalized, phonemes) = self.phonemize(text)?;
        let wave = self.synth.synthesize(&phonemes, None)?;
        Ok(Rendered { normalized, phonemes, wave })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backend_names_round_trip() {
        for b in Backend::ALL {
            assert_eq!(b.as_str().parse::<Backend>().unwrap(), b);
            assert_eq!(serde_json::to_string(&b).unwrap(), format!("\"{}\"", b.as_str()));
        }
        assert!("tacotron".parse::<Backend>().is_err());
    }

    #[test]
    fn renders_text() {
        let voice = Voice::new("en", Backend::MockFast, Arc::new(LexiconStack::builtin()), Exec::Sequential).unwrap();
        let out = voice.render("Hello, world!").unwrap();
        assert_eq!(out.normalized.to_string(), "hello , world !");
        assert!(!out.wave.is_empty());
        assert_eq!(voice.render("Hello, world!").unwrap(), out);
    }

    #[test]
    fn punctuation_only_is_an_error() {
        let voice = Voice::new("en", Backend::MockFast, Arc::new(LexiconStack::builtin()), Exec::Sequential).unwrap();
        assert!(matches!(voice.render("?!"), Err(VoiceError::Normalize(_)) | Err(VoiceError::Synth(_))));
    }
}
