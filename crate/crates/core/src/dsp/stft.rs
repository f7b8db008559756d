//! Centered short-time Fourier transform and its overlap-add inverse.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlannerScalar};

use super::{DspError, MelConfig};
use crate::Exec;

/// Number of frames a centered STFT produces for `n_samples` samples.
pub fn frame_count(n_samples: usize, hop: usize) -> usize {
    n_samples / hop + 1
}

/// Sample types the STFT accepts.
pub trait Sample: Copy + Into<f64> + Sync {}
impl Sample for f32 {}
impl Sample for f64 {}

/// Index into a signal of length `n` after reflect padding, with repeated
/// reflection when the pad exceeds the signal.
pub(crate) fn reflect_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m >= n as isize {
        (period - m) as usize
    } else {
        m as usize
    }
}

/// Precomputed window and FFT plans for one [`MelConfig`].
///
/// Uses the scalar FFT planner so results do not depend on which SIMD
/// instructions the host supports.
#[derive(Clone)]
pub struct Stft {
    n_fft: usize,
    hop: usize,
    win_length: usize,
    window: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Stft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Stft")
            .field("n_fft", &self.n_fft)
            .field("hop", &self.hop)
            .field("win_length", &self.win_length)
            .finish()
    }
}

impl Stft {
    pub fn new(config: &MelConfig) -> Result<Self, DspError> {
        config.validate()?;
        let n_fft = config.n_fft;
        let offset = (n_fft - config.win_length) / 2;
        let mut window = vec![0.0; n_fft];
        for n in 0..config.win_length {
            // periodic Hann
            window[offset + n] = 0.5 - 0.5 * (2.0 * PI * n as f64 / config.win_length as f64).cos();
        }
        let mut planner = FftPlannerScalar::new();
        Ok(Self {
            n_fft,
            hop: config.hop,
            win_length: config.win_length,
            window,
            forward: planner.plan_fft_forward(n_fft),
            inverse: planner.plan_fft_inverse(n_fft),
        })
    }

    pub fn n_fft(&self) -> usize {
        self.n_fft
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn n_bins(&self) -> usize {
        self.n_fft / 2 + 1
    }

    /// The Hann window zero-padded and centered in an `n_fft` buffer.
    pub fn window(&self) -> &[f64] {
        &self.window
    }

    /// Samples of frame `t` taken from the reflect-padded signal, unwindowed.
    /// Frame `t` is centered on sample `t * hop` and spans `len` samples.
    pub(crate) fn centered_segment<S: Sample>(&self, samples: &[S], t: usize, len: usize) -> Vec<f64> {
        let n = samples.len();
        let start = (t * self.hop) as isize - (len / 2) as isize;
        (0..len as isize).map(|k| samples[reflect_index(start + k, n)].into()).collect()
    }

    /// One-sided complex spectra, `frame_count(len) × (n_fft/2 + 1)`.
    pub fn spectra<S: Sample>(&self, samples: &[S], exec: Exec) -> Vec<Vec<Complex64>> {
        if samples.is_empty() {
            return Vec::new();
        }
        let frames = frame_count(samples.len(), self.hop);
        exec.map_range(frames, |t| {
            let seg = self.centered_segment(samples, t, self.n_fft);
            let mut buf: Vec<Complex64> =
                seg.iter().zip(&self.window).map(|(x, w)| Complex64::new(x * w, 0.0)).collect();
            self.forward.process(&mut buf);
            buf.truncate(self.n_bins());
            buf
        })
    }

    /// Magnitude spectra `|X|`.
    pub fn magnitudes<S: Sample>(&self, samples: &[S], exec: Exec) -> Vec<Vec<f64>> {
        let spectra = self.spectra(samples, exec);
        exec.map_range(spectra.len(), |t| spectra[t].iter().map(|c| c.norm()).collect())
    }

    /// Windowed overlap-add inverse of [`Stft::spectra`].
    ///
    /// Produces `(frames - 1) * hop` samples, the inverse of the centered
    /// framing with the padding removed.
    pub fn inverse(&self, spectra: &[Vec<Complex64>], exec: Exec) -> Vec<f64> {
        if spectra.is_empty() {
            return Vec::new();
        }
        let n_fft = self.n_fft;
        let frames = exec.map_range(spectra.len(), |t| {
            let half = &spectra[t];
            let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
            for (k, c) in half.iter().enumerate().take(n_fft / 2 + 1) {
                buf[k] = *c;
            }
            for k in 1..n_fft / 2 {
                buf[n_fft - k] = half[k].conj();
            }
            // DC and Nyquist bins of a real signal are real.
            buf[0].im = 0.0;
            buf[n_fft / 2].im = 0.0;
            self.inverse.process(&mut buf);
            let scale = 1.0 / n_fft as f64;
            buf.iter().zip(&self.window).map(|(c, w)| c.re * scale * w).collect::<Vec<f64>>()
        });

        let padded_len = n_fft + self.hop * (spectra.len() - 1);
        let mut out = vec![0.0; padded_len];
        let mut norm = vec![0.0; padded_len];
        let win_sq: Vec<f64> = self.window.iter().map(|w| w * w).collect();
        for (t, frame) in frames.iter().enumerate() {
            let start = t * self.hop;
            for k in 0..n_fft {
                out[start + k] += frame[k];
                norm[start + k] += win_sq[k];
            }
        }
        let pad = n_fft / 2;
        let len = self.hop * (spectra.len() - 1);
        (pad..pad + len).map(|i| if norm[i] > 1e-11 { out[i] / norm[i] } else { out[i] }).collect()
    }
}
