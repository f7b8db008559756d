//! Deterministic synthesizer backends.
//!
//! Synthesis runs in two stages, phonemes to acoustic frames and frames to
//! waveform, behind the [`Synthesizer`] trait. Two backends are provided:
//!
//! - `mock_glim`: [`AcousticStub`] log-mel frames inverted with Griffin-Lim.
//! - `mock_fast`: the same tone schedule rendered directly in the time domain.
//!
//! Both are pure functions of their input: no clocks, no randomness, and a
//! pinned FNV-1a hash for phone frequencies.

mod fast;
mod griffin_lim;
mod hash;
mod stub;
mod voice;

pub use fast::FastToneSynth;
pub use griffin_lim::{griffin_lim_vocode, GlimSynth, GriffinLim, DEFAULT_ITERATIONS};
pub use hash::{fnv1a64, PhoneFrequencies};
pub use stub::{AcousticStub, AcousticStubConfig, HARMONIC_GAINS_DB, TONE_AMPLITUDE};
pub use voice::{Backend, Rendered, Voice, VoiceError};

use thiserror::Error;

use crate::dsp::{DspError, TokenProsody, Waveform};
use crate::text::PhonemeSequence;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("empty phoneme sequence")]
    EmptyInput,
    #[error("mel configuration does not match the vocoder configuration")]
    ConfigMismatch,
    #[error(transparent)]
    Dsp(#[from] DspError),
}

/// A warm, immutable synthesizer instance.
///
/// Implementations must be deterministic: identical inputs give
/// bit-identical 24 kHz output. `prosody` is accepted for backends that
/// condition on token-level pitch and energy; the mock backends ignore it.
pub trait Synthesizer: Send + Sync {
    fn backend(&self) -> Backend;

    fn synthesize(&self, seq: &PhonemeSequence, prosody: Option<&TokenProsody>) -> Result<Waveform, SynthError>;
}
