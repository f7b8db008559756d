//! Time-domain rendering of the acoustic stub schedule.

use super::stub::{harmonic_tone, AcousticStub, AcousticStubConfig};
use super::{Backend, SynthError, Synthesizer};
use crate::dsp::{LogMelExtractor, MelConfig, TokenProsody, Waveform};
use crate::text::{PhonemeSequence, Unit};

/// Linear fade applied at both ends of every phone, in samples (5 ms).
const FADE_SAMPLES: usize = 120;

/// `mock_fast`: each phone's harmonic tone written straight into the output.
///
/// Shares the schedule and frequency table of [`AcousticStub`] but skips the
/// spectral round trip, so a request costs a few microseconds per phone.
#[derive(Debug, Clone)]
pub struct FastToneSynth {
    stub: AcousticStub,
}

impl FastToneSynth {
    pub fn new() -> Result<Self, SynthError> {
        let extractor = LogMelExtractor::new(MelConfig::default())?;
        Ok(Self { stub: AcousticStub::new(AcousticStubConfig::default(), &extractor)? })
    }

    pub fn from_stub(stub: AcousticStub) -> Self {
        Self { stub }
    }

    pub fn stub(&self) -> &AcousticStub {
        &self.stub
    }

    /// Output length in samples for `seq`.
    pub fn output_len(&self, seq: &PhonemeSequence) -> usize {
        let hop = self.stub.mel_config().hop;
        self.stub.schedule(seq).iter().map(|(_, n)| n * hop).sum()
    }
}

impl Synthesizer for FastToneSynth {
    fn backend(&self) -> Backend {
        Backend::MockFast
    }

    fn synthesize(&self, seq: &PhonemeSequence, _prosody: Option<&TokenProsody>) -> Result<Waveform, SynthError> {
        if seq.is_empty() {
            return Err(SynthError::EmptyInput);
        }
        let cfg = self.stub.mel_config();
        let mut out = Vec::with_capacity(self.output_len(seq));
        for (unit, frames) in self.stub.schedule(seq) {
            let n = frames * cfg.hop;
            match unit {
                Unit::Phone(p) => {
                    let freq = self.stub.frequencies().get(p) as f64;
                    let fade = FADE_SAMPLES.min(n / 2);
                    out.extend(harmonic_tone(freq, n, cfg.sample_rate).enumerate().map(|(i, s)| {
                        let edge = i.min(n - 1 - i);
                        let gain = if edge < fade { edge as f64 / fade as f64 } else { 1.0 };
                        (s * gain) as f32
                    }));
                }
                Unit::WordBoundary | Unit::Pause => out.extend(std::iter::repeat_n(0.0f32, n)),
            }
        }
        Ok(Waveform::from_unchecked(out, cfg.sample_rate))
    }
}
