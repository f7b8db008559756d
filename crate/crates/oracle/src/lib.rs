//! Slow, direct reference computations for checking the feature pipeline.
//!
//! Nothing here shares code with `voxsync-core`: padding, windowing, the DFT
//! and the filterbank are all written out from their definitions, with the
//! analysis parameters hard-coded.

use std::f64::consts::PI;

pub const SAMPLE_RATE: f64 = 24_000.0;
pub const N_FFT: usize = 2048;
pub const WIN: usize = 1200;
pub const HOP: usize = 300;
pub const N_MELS: usize = 80;
pub const F_MIN: f64 = 80.0;
pub const F_MAX: f64 = 7600.0;

/// numpy `np.pad(x, pad, mode="reflect")`, built by literally mirroring the
/// array about its current end points until it is long enough.
pub fn reflect_pad(x: &[f64], pad: usize) -> Vec<f64> {
    assert!(!x.is_empty());
    if x.len() == 1 {
        return vec![x[0]; 1 + 2 * pad];
    }
    let mut v = x.to_vec();
    let mut left = pad;
    while left > 0 {
        let k = left.min(v.len() - 1);
        let mirrored: Vec<f64> = v[1..=k].iter().rev().copied().collect();
        v.splice(0..0, mirrored);
        left -= k;
    }
    let mut right = pad;
    while right > 0 {
        let k = right.min(v.len() - 1);
        let n = v.len();
        let mirrored: Vec<f64> = v[n - 1 - k..n - 1].iter().rev().copied().collect();
        v.extend(mirrored);
        right -= k;
    }
    v
}

/// Periodic Hann of length `WIN`, centered in `N_FFT` with zeros around it.
pub fn window() -> Vec<f64> {
    let lead = (N_FFT - WIN) / 2;
    (0..N_FFT)
        .map(|i| {
            if i < lead || i >= lead + WIN {
                0.0
            } else {
                let n = (i - lead) as f64;
                (PI * n / WIN as f64).sin().powi(2)
            }
        })
        .collect()
}

/// Mel filter center and edge frequencies in Hz (`N_MELS + 2` points).
pub fn mel_points_hz() -> Vec<f64> {
    // 2595 log10(1 + f/700) == (2595 / ln 10) ln(1 + f/700)
    let k = 2595.0 / std::f64::consts::LN_10;
    let to_mel = |f: f64| k * (f / 700.0).ln_1p();
    let to_hz = |m: f64| 700.0 * ((m / k).exp() - 1.0);
    let (lo, hi) = (to_mel(F_MIN), to_mel(F_MAX));
    (0..N_MELS + 2).map(|i| to_hz(lo + (hi - lo) * i as f64 / (N_MELS + 1) as f64)).collect()
}

pub fn filter_centers_hz() -> Vec<f64> {
    mel_points_hz()[1..=N_MELS].to_vec()
}

/// Dense `N_MELS × (N_FFT/2+1)` triangle weights, peak 1.
pub fn filterbank() -> Vec<Vec<f64>> {
    let pts = mel_points_hz();
    (0..N_MELS)
        .map(|m| {
            (0..=N_FFT / 2)
                .map(|k| {
                    let f = k as f64 * SAMPLE_RATE / N_FFT as f64;
                    if f <= pts[m] || f >= pts[m + 2] {
                        0.0
                    } else if f <= pts[m + 1] {
                        (f - pts[m]) / (pts[m + 1] - pts[m])
                    } else {
                        (pts[m + 2] - f) / (pts[m + 2] - pts[m + 1])
                    }
                })
                .collect()
        })
        .collect()
}

/// Direct-summation DFT magnitudes of every centered frame, bins `0..=N_FFT/2`.
///
/// `max_bin` limits the bins evaluated (the rest are left at zero).
pub fn stft_magnitudes(samples: &[f32], max_bin: usize) -> Vec<Vec<f64>> {
    let x: Vec<f64> = samples.iter().map(|&s| s as f64).collect();
    let padded = reflect_pad(&x, N_FFT / 2);
    let win = window();
    let cos: Vec<f64> = (0..N_FFT).map(|i| (2.0 * PI * i as f64 / N_FFT as f64).cos()).collect();
    let sin: Vec<f64> = (0..N_FFT).map(|i| (2.0 * PI * i as f64 / N_FFT as f64).sin()).collect();
    let frames = 1 + (padded.len() - N_FFT) / HOP;
    (0..frames)
        .map(|t| {
            let seg: Vec<(usize, f64)> =
                (0..N_FFT).filter(|&n| win[n] != 0.0).map(|n| (n, padded[t * HOP + n] * win[n])).collect();
            (0..=N_FFT / 2)
                .map(|k| {
                    if k > max_bin {
                        return 0.0;
                    }
                    let (mut re, mut im) = (0.0, 0.0);
                    for &(n, v) in &seg {
                        let idx = (k * n) % N_FFT;
                        re += v * cos[idx];
                        im -= v * sin[idx];
                    }
                    (re * re + im * im).sqrt()
                })
                .collect()
        })
        .collect()
}

/// Reference log-mel: `ln(max(fb · |X|, 1e-10))` per frame.
pub fn log_mel(samples: &[f32]) -> Vec<Vec<f64>> {
    let fb = filterbank();
    let top = fb.iter().map(|row| row.iter().rposition(|&w| w > 0.0).unwrap_or(0)).max().unwrap_or(0);
    stft_magnitudes(samples, top)
        .iter()
        .map(|mag| fb.iter().map(|row| row.iter().zip(mag).map(|(w, m)| w * m).sum::<f64>().max(1e-10).ln()).collect())
        .collect()
}

/// Reference frame energy: L2 norm of the full magnitude spectrum.
pub fn energy(samples: &[f32]) -> Vec<f64> {
    stft_magnitudes(samples, N_FFT / 2).iter().map(|m| m.iter().map(|v| v * v).sum::<f64>().sqrt()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflect_matches_numpy() {
        let x = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(reflect_pad(&x, 2), [2.0, 1.0, 0.0, 1.0, 2.0, 3.0, 2.0, 1.0]);
        assert_eq!(reflect_pad(&x, 5), [1.0, 2.0, 3.0, 2.0, 1.0, 0.0, 1.0, 2.0, 3.0, 2.0, 1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn window_peak() {
        let w = window();
        assert_eq!(w[424], 0.0);
        assert!((w[1024] - 1.0).abs() < 1e-12);
    }
}
