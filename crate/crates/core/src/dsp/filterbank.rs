//! Triangular mel filterbank on the HTK mel scale.

use super::{DspError, MelConfig};

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// `n_mels × (n_fft/2 + 1)` weights. Triangles peak at 1 (no area normalization).
#[derive(Debug, Clone, PartialEq)]
pub struct MelFilterbank {
    weights: Vec<Vec<f64>>,
    /// Nonzero column range of each row.
    support: Vec<(usize, usize)>,
    centers_hz: Vec<f64>,
}

impl MelFilterbank {
    pub fn n_mels(&self) -> usize {
        self.weights.len()
    }

    pub fn n_bins(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.weights[m]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn centers_hz(&self) -> &[f64] {
        &self.centers_hz
    }

    /// Half-open range of bins with nonzero weight in row `m`.
    pub fn support(&self, m: usize) -> (usize, usize) {
        self.support[m]
    }

    /// Projects one magnitude spectrum onto the mel bands.
    pub fn apply(&self, spectrum: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.support)
            .map(|(row, &(lo, hi))| (lo..hi).map(|k| row[k] * spectrum[k]).sum())
            .collect()
    }
}

pub fn mel_filterbank(config: &MelConfig) -> Result<MelFilterbank, DspError> {
    config.validate()?;
    let n_bins = config.n_bins();
    let mel_lo = hz_to_mel(config.fmin);
    let mel_hi = hz_to_mel(config.fmax);
    let points: Vec<f64> = (0..config.n_mels + 2)
        .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (config.n_mels + 1) as f64))
        .collect();
    let bin_hz = config.sample_rate as f64 / config.n_fft as f64;

    let mut weights = Vec::with_capacity(config.n_mels);
    let mut support = Vec::with_capacity(config.n_mels);
    for m in 0..config.n_mels {
        let (left, center, right) = (points[m], points[m + 1], points[m + 2]);
        let row: Vec<f64> = (0..n_bins)
            .map(|k| {
                let f = k as f64 * bin_hz;
                let rising = (f - left) / (center - left);
                let falling = (right - f) / (right - center);
                rising.min(falling).max(0.0)
            })
            .collect();
        let lo = row.iter().position(|&w| w > 0.0).ok_or(DspError::DegenerateFilter { index: m })?;
        let hi = row.iter().rposition(|&w| w > 0.0).unwrap() + 1;
        weights.push(row);
        support.push((lo, hi));
    }
    Ok(MelFilterbank { weights, support, centers_hz: points[1..=config.n_mels].to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mel_scale_round_trips() {
        for hz in [0.0, 80.0, 440.0, 1000.0, 7600.0] {
            assert!((mel_to_hz(hz_to_mel(hz)) - hz).abs() < 1e-9);
        }
        assert!((hz_to_mel(1000.0) - 999.98553).abs() < 1e-4);
    }

    #[test]
    fn shape_and_edges() {
        let fb = mel_filterbank(&MelConfig::default()).unwrap();
        assert_eq!(fb.n_mels(), 80);
        assert_eq!(fb.n_bins(), 1025);
        // round(80 * 2048 / 24000) = 7
        assert_eq!(fb.support(0).0, 7);
        for m in 0..80 {
            assert!(fb.row(m)[649..].iter().all(|&w| w == 0.0), "row {m}");
            assert!(fb.row(m).iter().all(|&w| w >= 0.0));
        }
        assert!(fb.centers_hz().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn degenerate_filters_rejected() {
        let cfg = MelConfig { n_mels: 400, fmin: 0.0, fmax: 200.0, ..MelConfig::default() };
        assert!(matches!(mel_filterbank(&cfg), Err(DspError::DegenerateFilter { .. })));
    }
}
