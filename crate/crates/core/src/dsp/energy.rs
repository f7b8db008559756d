use super::{DspError, LogMelExtractor, MelConfig, Waveform};
use crate::Exec;

/// Per-frame L2 norm of the STFT magnitude vector, framed exactly like the log-mel.
pub fn extract_energy(wave: &Waveform) -> Result<Vec<f64>, DspError> {
    extract_energy_with(&LogMelExtractor::new(MelConfig::default())?, wave, Exec::default())
}

pub fn extract_energy_with(extractor: &LogMelExtractor, wave: &Waveform, exec: Exec) -> Result<Vec<f64>, DspError> {
    extractor.check(wave)?;
    let mags = extractor.stft().magnitudes(wave.samples(), exec);
    Ok(mags.iter().map(|m| m.iter().map(|x| x * x).sum::<f64>().sqrt()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(freq: f64, n: usize, amp: f64) -> Waveform {
        Waveform::new(
            (0..n).map(|i| (amp * (2.0 * std::f64::consts::PI * freq * i as f64 / 24_000.0).sin()) as f32).collect(),
            24_000,
        )
        .unwrap()
    }

    #[test]
    fn silence_has_zero_energy() {
        let e = extract_energy(&Waveform::silence(24_000, 24_000)).unwrap();
        assert_eq!(e.len(), 81);
        assert!(e.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn sine_energy_is_flat_and_linear() {
        let w = sine(440.0, 24_000, 1.0);
        let e = extract_energy(&w).unwrap();
        let interior = &e[4..e.len() - 4];
        let mean = interior.iter().sum::<f64>() / interior.len() as f64;
        let sd = (interior.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / interior.len() as f64).sqrt();
        assert!(sd / mean < 0.05, "relative sd {}", sd / mean);

        let half = extract_energy(&w.scaled(0.5)).unwrap();
        for (a, b) in e.iter().zip(&half) {
            assert!((a * 0.5 - b).abs() <= 1e-6 * a.max(1.0), "{a} {b}");
        }
    }
}
