use serde::{Deserialize, Serialize};

use super::DspError;

/// Log-mel analysis parameters.
///
/// The defaults are the 24 kHz vocoder configuration: 80 bands over
/// 80–7600 Hz, 2048-point FFT, 1200-sample Hann window, hop 300.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MelConfig {
    pub sample_rate: u32,
    pub n_fft: usize,
    pub win_length: usize,
    pub hop: usize,
    pub n_mels: usize,
    pub fmin: f64,
    pub fmax: f64,
}

impl Default for MelConfig {
    fn default() -> Self {
        Self { sample_rate: 24_000, n_fft: 2048, win_length: 1200, hop: 300, n_mels: 80, fmin: 80.0, fmax: 7600.0 }
    }
}

impl MelConfig {
    pub fn n_bins(&self) -> usize {
        self.n_fft / 2 + 1
    }

    pub fn validate(&self) -> Result<(), DspError> {
        let bad = |m: &str| Err(DspError::InvalidConfig(m.to_string()));
        if self.sample_rate == 0 {
            return bad("sample_rate must be positive");
        }
        if self.n_mels == 0 || self.hop == 0 || self.win_length == 0 {
            return bad("n_mels, hop and win_length must be positive");
        }
        if !(self.fmin >= 0.0 && self.fmin < self.fmax && self.fmax <= self.sample_rate as f64 / 2.0) {
            return bad("require 0 <= fmin < fmax <= sample_rate / 2");
        }
        if self.win_length > self.n_fft {
            return bad("win_length must not exceed n_fft");
        }
        if self.hop > self.win_length {
            return bad("hop must not exceed win_length");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        MelConfig::default().validate().unwrap();
        assert_eq!(MelConfig::default().n_bins(), 1025);
    }

    #[test]
    fn invalid_configs() {
        let base = MelConfig::default();
        for cfg in [
            MelConfig { fmin: 8000.0, ..base },
            MelConfig { fmax: 13_000.0, ..base },
            MelConfig { win_length: 4096, ..base },
            MelConfig { hop: 1500, ..base },
            MelConfig { sample_rate: 0, ..base },
        ] {
            assert!(matches!(cfg.validate(), Err(DspError::InvalidConfig(_))), "{cfg:?}");
        }
    }
}
