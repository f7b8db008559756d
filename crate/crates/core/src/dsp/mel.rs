//! Log-mel spectrogram extraction.

use super::filterbank::{mel_filterbank, MelFilterbank};
use super::stft::Stft;
use super::{DspError, MelConfig, Waveform};
use crate::Exec;

/// Magnitudes below this are clamped before the natural log.
pub const LOG_FLOOR: f64 = 1e-10;

/// `T × n_mels` natural-log mel magnitudes, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MelSpectrogram {
    data: Vec<f64>,
    n_frames: usize,
    config: MelConfig,
}

impl MelSpectrogram {
    pub fn from_frames(frames: Vec<Vec<f64>>, config: MelConfig) -> Self {
        let n_frames = frames.len();
        assert!(frames.iter().all(|f| f.len() == config.n_mels), "frame width must equal n_mels");
        Self { data: frames.into_iter().flatten().collect(), n_frames, config }
    }

    /// A spectrogram of `n_frames` frames at the log floor.
    pub fn floor(n_frames: usize, config: MelConfig) -> Self {
        Self { data: vec![LOG_FLOOR.ln(); n_frames * config.n_mels], n_frames, config }
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn n_mels(&self) -> usize {
        self.config.n_mels
    }

    pub fn config(&self) -> &MelConfig {
        &self.config
    }

    pub fn frame(&self, t: usize) -> &[f64] {
        let w = self.config.n_mels;
        &self.data[t * w..(t + 1) * w]
    }

    pub fn frame_mut(&mut self, t: usize) -> &mut [f64] {
        let w = self.config.n_mels;
        &mut self.data[t * w..(t + 1) * w]
    }

    pub fn frames(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.config.n_mels.max(1))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Appends all frames of `other`, which must share this configuration.
    pub fn append(&mut self, other: &MelSpectrogram) {
        assert_eq!(self.config, other.config);
        self.data.extend_from_slice(&other.data);
        self.n_frames += other.n_frames;
    }
}

/// Filterbank and STFT plans computed once per configuration.
#[derive(Debug, Clone)]
pub struct LogMelExtractor {
    config: MelConfig,
    stft: Stft,
    filterbank: MelFilterbank,
}

impl LogMelExtractor {
    pub fn new(config: MelConfig) -> Result<Self, DspError> {
        Ok(Self { config, stft: Stft::new(&config)?, filterbank: mel_filterbank(&config)? })
    }

    pub fn config(&self) -> &MelConfig {
        &self.config
    }

    pub fn stft(&self) -> &Stft {
        &self.stft
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.filterbank
    }

    pub fn check(&self, wave: &Waveform) -> Result<(), DspError> {
        if wave.sample_rate() != self.config.sample_rate {
            return Err(DspError::SampleRateMismatch { expected: self.config.sample_rate, actual: wave.sample_rate() });
        }
        if wave.is_empty() {
            return Err(DspError::EmptyWaveform);
        }
        Ok(())
    }

    pub fn extract(&self, wave: &Waveform, exec: Exec) -> Result<MelSpectrogram, DspError> {
        self.check(wave)?;
        let mags = self.stft.magnitudes(wave.samples(), exec);
        Ok(self.from_magnitudes(&mags, exec))
    }

    /// Log-mel frames from precomputed magnitude spectra.
    pub fn from_magnitudes(&self, mags: &[Vec<f64>], exec: Exec) -> MelSpectrogram {
        let frames = exec.map_range(mags.len(), |t| {
            self.filterbank.apply(&mags[t]).into_iter().map(|v| v.max(LOG_FLOOR).ln()).collect()
        });
        MelSpectrogram::from_frames(frames, self.config)
    }
}

/// One-shot log-mel extraction. Prefer a shared [`LogMelExtractor`] in loops.
pub fn log_mel(wave: &Waveform, config: &MelConfig) -> Result<MelSpectrogram, DspError> {
    LogMelExtractor::new(*config)?.extract(wave, Exec::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn silence_sits_on_the_floor() {
        let mel = log_mel(&Waveform::silence(24_000, 24_000), &MelConfig::default()).unwrap();
        assert_eq!(mel.n_frames(), 81);
        assert!(mel.as_slice().iter().all(|&v| v == LOG_FLOOR.ln()));
    }

    #[test]
    fn frame_counts() {
        let cfg = MelConfig::default();
        for (n, t) in [(24_000, 81), (24_300, 82), (1, 1), (299, 1), (300, 2)] {
            let mel = log_mel(&Waveform::silence(n, 24_000), &cfg).unwrap();
            assert_eq!(mel.n_frames(), t, "n = {n}");
        }
    }

    #[test]
    fn errors() {
        let cfg = MelConfig::default();
        assert_eq!(
            log_mel(&Waveform::silence(100, 16_000), &cfg),
            Err(DspError::SampleRateMismatch { expected: 24_000, actual: 16_000 })
        );
        assert_eq!(log_mel(&Waveform::silence(0, 24_000), &cfg), Err(DspError::EmptyWaveform));
    }
}
