//! Phonemes to log-mel frames with a fixed duration and tone table.

use std::collections::HashMap;
use std::f64::consts::PI;

use super::hash::PhoneFrequencies;
use super::SynthError;
use crate::dsp::{LogMelExtractor, MelConfig, MelSpectrogram, Waveform};
use crate::text::{Phone, PhonemeSequence, Unit};
use crate::Exec;

/// Peak amplitude of the fundamental.
pub const TONE_AMPLITUDE: f64 = 0.5;
/// Fundamental, second and third harmonic levels relative to the fundamental.
pub const HARMONIC_GAINS_DB: [f64; 3] = [0.0, -6.0, -12.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcousticStubConfig {
    pub vowel_ms: f64,
    pub consonant_ms: f64,
    pub pause_ms: f64,
    pub boundary_ms: f64,
}

impl Default for AcousticStubConfig {
    fn default() -> Self {
        Self { vowel_ms: 120.0, consonant_ms: 80.0, pause_ms: 200.0, boundary_ms: 40.0 }
    }
}

impl AcousticStubConfig {
    pub fn unit_ms(&self, unit: Unit) -> f64 {
        match unit {
            Unit::Phone(p) if p.is_vowel() => self.vowel_ms,
            Unit::Phone(_) => self.consonant_ms,
            Unit::Pause => self.pause_ms,
            Unit::WordBoundary => self.boundary_ms,
        }
    }
}

/// Samples of the harmonic tone used for a phone at `freq` Hz.
pub(crate) fn harmonic_tone(freq: f64, n: usize, sample_rate: u32) -> impl Iterator<Item = f64> {
    let gains = HARMONIC_GAINS_DB.map(|db| TONE_AMPLITUDE * 10f64.powf(db / 20.0));
    let sr = sample_rate as f64;
    (0..n).map(move |i| {
        let t = i as f64 / sr;
        gains.iter().enumerate().map(|(h, g)| g * (2.0 * PI * freq * (h + 1) as f64 * t).sin()).sum()
    })
}

/// Deterministic stand-in for an acoustic model.
///
/// Each unit lasts `round(ms · sample_rate / (1000 · hop))` frames. Phone
/// frames repeat the steady-state log-mel frame of the phone's harmonic tone;
/// pause and boundary frames sit at the log floor.
#[derive(Debug, Clone)]
pub struct AcousticStub {
    config: AcousticStubConfig,
    mel: MelConfig,
    freqs: PhoneFrequencies,
    frames: HashMap<Phone, Vec<f64>>,
}

impl AcousticStub {
    pub fn new(config: AcousticStubConfig, extractor: &LogMelExtractor) -> Result<Self, SynthError> {
        let mel = *extractor.config();
        let freqs = PhoneFrequencies::new();
        // Long enough that the middle frame's window is fully inside the tone.
        let len = 2 * mel.n_fft + 2 * mel.hop;
        let mid = len / mel.hop / 2;
        let mut frames = HashMap::new();
        for phone in Phone::all() {
            let tone: Vec<f32> =
                harmonic_tone(freqs.get(phone) as f64, len, mel.sample_rate).map(|s| s as f32).collect();
            let spec = extractor.extract(&Waveform::new(tone, mel.sample_rate)?, Exec::Sequential)?;
            frames.insert(phone, spec.frame(mid).to_vec());
        }
        Ok(Self { config, mel, freqs, frames })
    }

    pub fn config(&self) -> &AcousticStubConfig {
        &self.config
    }

    pub fn mel_config(&self) -> &MelConfig {
        &self.mel
    }

    pub fn frequencies(&self) -> &PhoneFrequencies {
        &self.freqs
    }

    pub fn unit_frames(&self, unit: Unit) -> usize {
        let ms = self.config.unit_ms(unit);
        (ms * self.mel.sample_rate as f64 / (1000.0 * self.mel.hop as f64)).round() as usize
    }

    /// Every unit paired with its frame count.
    pub fn schedule(&self, seq: &PhonemeSequence) -> Vec<(Unit, usize)> {
        seq.units().iter().map(|&u| (u, self.unit_frames(u))).collect()
    }

    pub fn render(&self, seq: &PhonemeSequence) -> Result<MelSpectrogram, SynthError> {
        if seq.is_empty() {
            return Err(SynthError::EmptyInput);
        }
        let floor = MelSpectrogram::floor(1, self.mel);
        let mut frames = Vec::new();
        for (unit, n) in self.schedule(seq) {
            let frame = match unit {
                Unit::Phone(p) => &self.frames[&p],
                _ => floor.frame(0),
            };
            frames.extend(std::iter::repeat_n(frame.to_vec(), n));
        }
        Ok(MelSpectrogram::from_frames(frames, self.mel))
    }
}
