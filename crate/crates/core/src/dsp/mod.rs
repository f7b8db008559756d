//! Feature extraction for corpus preparation and vocoding.
//!
//! All frame-based features share one framing: a centered STFT with reflect
//! padding of `n_fft / 2`, a periodic Hann window of `win_length` samples
//! centered in the `n_fft` buffer, and `hop` samples between frames. A signal
//! of `N` samples therefore yields `N / hop + 1` frames for the log-mel,
//! pitch and energy tracks alike.

mod config;
mod energy;
mod features_io;
mod filterbank;
mod mel;
mod pitch;
mod prosody;
mod stft;
mod utterance;
mod vad;
mod waveform;

pub use config::MelConfig;
pub use energy::{extract_energy, extract_energy_with};
pub use features_io::{read_f32_le, write_f32_le, FeatureSidecar, TrackShape};
pub use filterbank::{hz_to_mel, mel_filterbank, mel_to_hz, MelFilterbank};
pub use mel::{log_mel, LogMelExtractor, MelSpectrogram, LOG_FLOOR};
pub use pitch::{extract_pitch, extract_pitch_with, PitchConfig};
pub use prosody::{token_average, ProsodyTrack, TokenProsody, TokenStats};
pub use stft::{frame_count, Sample, Stft};
pub use utterance::{filter_utterance, RejectReason, UtteranceVerdict, MAX_UTTERANCE_SECS, MIN_UTTERANCE_SECS};
pub use vad::{detect_voice_activity, trim_silence, VadConfig, VoiceActivity};
pub use waveform::Waveform;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DspError {
    #[error("sample rate mismatch: expected {expected} Hz, got {actual} Hz")]
    SampleRateMismatch { expected: u32, actual: u32 },
    #[error("waveform is empty")]
    EmptyWaveform,
    #[error("waveform contains a non-finite or out-of-range sample at index {0}")]
    InvalidSample(usize),
    #[error("invalid mel configuration: {0}")]
    InvalidConfig(String),
    #[error("mel filter {index} has no nonzero weight")]
    DegenerateFilter { index: usize },
    #[error("waveform shorter than one analysis frame ({needed} samples)")]
    TooShort { needed: usize },
    #[error("no speech detected")]
    NoSpeechDetected,
    #[error("durations sum to {actual} frames but the track has {expected}")]
    DurationMismatch { expected: usize, actual: usize },
    #[error("token {0} has zero duration")]
    ZeroDuration(usize),
}
