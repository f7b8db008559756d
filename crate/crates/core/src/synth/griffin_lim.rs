//! Mel-to-waveform inversion with Griffin-Lim phase recovery.

use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;

use super::stub::{AcousticStub, AcousticStubConfig};
use super::{Backend, SynthError, Synthesizer};
use crate::dsp::{LogMelExtractor, MelConfig, MelSpectrogram, TokenProsody, Waveform};
use crate::text::PhonemeSequence;
use crate::Exec;

pub const DEFAULT_ITERATIONS: usize = 32;
const OUTPUT_PEAK: f64 = 0.9;
/// Below this peak the output is left unnormalized (silence stays silent).
const NORMALIZE_MIN_PEAK: f64 = 1e-6;

/// Warm Griffin-Lim vocoder: STFT plans plus the filterbank pseudo-inverse.
#[derive(Debug, Clone)]
pub struct GriffinLim {
    extractor: LogMelExtractor,
    /// `n_bins × n_mels`, row-major.
    pinv: Vec<f64>,
    iterations: usize,
    exec: Exec,
}

impl GriffinLim {
    pub fn new(extractor: LogMelExtractor, iterations: usize, exec: Exec) -> Self {
        let fb = extractor.filterbank();
        let (n_mels, n_bins) = (fb.n_mels(), fb.n_bins());
        let a = DMatrix::from_fn(n_mels, n_bins, |m, k| fb.row(m)[k]);
        // Minimum-norm least squares: A^T (A A^T)^-1. The triangles overlap
        // only with neighbours, so A A^T is banded and well conditioned.
        let gram = &a * a.transpose();
        let gram_inv = gram.cholesky().expect("mel filterbank Gram matrix is positive definite").inverse();
        let pinv_m = a.transpose() * gram_inv;
        let pinv = (0..n_bins).flat_map(|k| (0..n_mels).map(move |m| (k, m))).map(|(k, m)| pinv_m[(k, m)]).collect();
        Self { extractor, pinv, iterations, exec }
    }

    pub fn config(&self) -> &MelConfig {
        self.extractor.config()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Linear magnitudes from log-mel frames, clamped at zero.
    pub fn linear_magnitudes(&self, mel: &MelSpectrogram) -> Vec<Vec<f64>> {
        let n_mels = mel.n_mels();
        let n_bins = self.extractor.config().n_bins();
        self.exec.map_range(mel.n_frames(), |t| {
            let lin: Vec<f64> = mel.frame(t).iter().map(|v| v.exp()).collect();
            (0..n_bins)
                .map(|k| {
                    let row = &self.pinv[k * n_mels..(k + 1) * n_mels];
                    row.iter().zip(&lin).map(|(p, x)| p * x).sum::<f64>().max(0.0)
                })
                .collect()
        })
    }

    /// Inverts `mel` starting from zero phase. Output has `(T - 1) · hop` samples.
    pub fn vocode(&self, mel: &MelSpectrogram) -> Result<Waveform, SynthError> {
        if mel.config() != self.extractor.config() {
            return Err(SynthError::ConfigMismatch);
        }
        let cfg = *self.extractor.config();
        if mel.n_frames() < 2 {
            return Ok(Waveform::silence(cfg.hop * mel.n_frames(), cfg.sample_rate));
        }
        let stft = self.extractor.stft();
        let target = self.linear_magnitudes(mel);
        let mut spectra: Vec<Vec<Complex64>> =
            target.iter().map(|frame| frame.iter().map(|&m| Complex64::new(m, 0.0)).collect()).collect();

        for _ in 0..self.iterations {
            let signal = stft.inverse(&spectra, self.exec);
            let rebuilt = stft.spectra(&signal, self.exec);
            self.exec.for_each_mut(&mut spectra, |t, frame| {
                for (k, bin) in frame.iter_mut().enumerate() {
                    let c = rebuilt[t][k];
                    let norm = c.norm();
                    let phasor = if norm > 0.0 { c / norm } else { Complex64::new(1.0, 0.0) };
                    *bin = phasor * target[t][k];
                }
            });
        }

        let mut signal = stft.inverse(&spectra, self.exec);
        let peak = signal.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        if peak >= NORMALIZE_MIN_PEAK {
            let gain = OUTPUT_PEAK / peak;
            signal.iter_mut().for_each(|s| *s *= gain);
        }
        Ok(Waveform::from_unchecked(signal.into_iter().map(|s| s as f32), cfg.sample_rate))
    }
}

/// One-shot vocoding with the default configuration.
pub fn griffin_lim_vocode(mel: &MelSpectrogram, iterations: usize) -> Result<Waveform, SynthError> {
    let extractor = LogMelExtractor::new(MelConfig::default())?;
    GriffinLim::new(extractor, iterations, Exec::default()).vocode(mel)
}

/// `mock_glim`: acoustic stub frames inverted with Griffin-Lim.
#[derive(Debug, Clone)]
pub struct GlimSynth {
    stub: AcousticStub,
    vocoder: GriffinLim,
}

impl GlimSynth {
    pub fn new(exec: Exec) -> Result<Self, SynthError> {
        let extractor = LogMelExtractor::new(MelConfig::default())?;
        Ok(Self {
            stub: AcousticStub::new(AcousticStubConfig::default(), &extractor)?,
            vocoder: GriffinLim::new(extractor, DEFAULT_ITERATIONS, exec),
        })
    }

    pub fn stub(&self) -> &AcousticStub {
        &self.stub
    }
}

impl Synthesizer for GlimSynth {
    fn backend(&self) -> Backend {
        Backend::MockGlim
    }

    fn synthesize(&self, seq: &PhonemeSequence, _prosody: Option<&TokenProsody>) -> Result<Waveform, SynthError> {
        self.vocoder.vocode(&self.stub.render(seq)?)
    }
}
