//! Autocorrelation pitch tracking restricted to 80–400 Hz.

use super::stft::Stft;
use super::{DspError, MelConfig, Waveform};
use crate::Exec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchConfig {
    pub fmin: f64,
    pub fmax: f64,
    /// Minimum normalized autocorrelation for a frame to count as voiced.
    pub voicing_threshold: f64,
    /// A shorter-lag peak within this fraction of the strongest peak is
    /// preferred, which stops harmonics of the true period from winning.
    pub octave_tolerance: f64,
}

impl Default for PitchConfig {
    fn default() -> Self {
        Self { fmin: 80.0, fmax: 400.0, voicing_threshold: 0.5, octave_tolerance: 0.9 }
    }
}

/// Per-frame pitch in Hz, 0 for unvoiced frames. Same framing as the log-mel.
///
/// Each frame is the unwindowed `win_length` span centered on `t * hop`. The
/// normalized autocorrelation is evaluated from lag 1 up to one past the
/// longest allowed period, and its local maxima are the period candidates.
/// The shortest candidate within `octave_tolerance` of the best one is the
/// period; the frame is voiced only if that period lies in
/// `[sr/fmax, sr/fmin]` samples and its correlation reaches the threshold.
/// There is no sub-lag interpolation.
pub fn extract_pitch(wave: &Waveform) -> Result<Vec<f64>, DspError> {
    extract_pitch_with(wave, &MelConfig::default(), &PitchConfig::default(), Exec::default())
}

pub fn extract_pitch_with(
    wave: &Waveform,
    mel: &MelConfig,
    pitch: &PitchConfig,
    exec: Exec,
) -> Result<Vec<f64>, DspError> {
    if wave.sample_rate() != mel.sample_rate {
        return Err(DspError::SampleRateMismatch { expected: mel.sample_rate, actual: wave.sample_rate() });
    }
    if wave.is_empty() {
        return Err(DspError::EmptyWaveform);
    }
    let stft = Stft::new(mel)?;
    let sr = mel.sample_rate as f64;
    let min_lag = (sr / pitch.fmax).round() as usize;
    let max_lag = (sr / pitch.fmin).round() as usize;
    let win = mel.win_length;
    if max_lag + 2 > win {
        return Err(DspError::InvalidConfig("pitch window too short for fmin".into()));
    }
    let frames = super::frame_count(wave.len(), mel.hop);
    Ok(exec.map_range(frames, |t| {
        let seg = stft.centered_segment(wave.samples(), t, win);
        match pick_period(&seg, max_lag, pitch) {
            Some(lag) if (min_lag..=max_lag).contains(&lag) => sr / lag as f64,
            _ => 0.0,
        }
    }))
}

fn pick_period(x: &[f64], max_lag: usize, cfg: &PitchConfig) -> Option<usize> {
    let w = x.len();
    let mut prefix = vec![0.0; w + 1];
    for (i, v) in x.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v * v;
    }
    // r[lag] for lag in 0..=max_lag+1
    let r: Vec<f64> = (0..=max_lag + 1)
        .map(|lag| {
            if lag == 0 {
                return 1.0;
            }
            let m = w - lag;
            let cross: f64 = x[..m].iter().zip(&x[lag..]).map(|(a, b)| a * b).sum();
            let denom = (prefix[m] * (prefix[w] - prefix[lag])).sqrt();
            if denom > 0.0 {
                cross / denom
            } else {
                0.0
            }
        })
        .collect();

    let peaks: Vec<usize> = (2..=max_lag).filter(|&l| r[l] > r[l - 1] && r[l] >= r[l + 1]).collect();
    let best = peaks.iter().map(|&l| r[l]).fold(f64::NEG_INFINITY, f64::max);
    if best.is_nan() || best < cfg.voicing_threshold {
        return None;
    }
    peaks.into_iter().find(|&l| r[l] >= cfg.octave_tolerance * best && r[l] >= cfg.voicing_threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone(n: usize, f: impl Fn(f64) -> f64) -> Waveform {
        Waveform::new((0..n).map(|i| f(i as f64 / 24_000.0) as f32).collect(), 24_000).unwrap()
    }

    fn sawtooth(freq: f64) -> Waveform {
        tone(24_000, |t| {
            let phase = (t * freq).fract();
            0.9 * (2.0 * phase - 1.0)
        })
    }

    #[test]
    fn sawtooth_120hz() {
        let p = extract_pitch(&sawtooth(120.0)).unwrap();
        assert_eq!(p.len(), 81);
        let good = p.iter().filter(|&&f| f > 0.0 && (f - 120.0).abs() <= 3.0).count();
        assert!(good as f64 >= 0.9 * p.len() as f64, "{good}/{} {p:?}", p.len());
    }

    #[test]
    fn out_of_range_tones_are_unvoiced() {
        for freq in [60.0, 500.0] {
            let p = extract_pitch(&tone(24_000, |t| 0.8 * (2.0 * PI * freq * t).sin())).unwrap();
            assert!(p.iter().all(|&f| f == 0.0), "{freq} Hz: {p:?}");
        }
    }

    #[test]
    fn voiced_values_stay_in_range() {
        for freq in [85.0, 150.0, 220.0, 390.0] {
            let p = extract_pitch(&tone(12_000, |t| 0.8 * (2.0 * PI * freq * t).sin())).unwrap();
            assert!(p.iter().all(|&f| f == 0.0 || (80.0..=400.0).contains(&f)));
            let voiced: Vec<_> = p.iter().filter(|&&f| f > 0.0).collect();
            assert!(voiced.len() > p.len() / 2, "{freq}: {p:?}");
            for f in voiced {
                assert!((f - freq).abs() / freq < 0.02, "{freq}: {f}");
            }
        }
    }

    #[test]
    fn silence_is_unvoiced() {
        let p = extract_pitch(&Waveform::silence(24_000, 24_000)).unwrap();
        assert!(p.iter().all(|&f| f == 0.0));
    }

    #[test]
    fn rejects_wrong_rate() {
        assert!(matches!(extract_pitch(&Waveform::silence(100, 16_000)), Err(DspError::SampleRateMismatch { .. })));
    }
}
