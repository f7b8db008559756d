use serde::{Deserialize, Serialize};

use super::DspError;

/// Frame-aligned pitch (Hz, 0 = unvoiced) and energy.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ProsodyTrack {
    pub pitch_hz: Vec<f64>,
    pub energy: Vec<f64>,
}

impl ProsodyTrack {
    pub fn new(pitch_hz: Vec<f64>, energy: Vec<f64>) -> Result<Self, DspError> {
        if pitch_hz.len() != energy.len() {
            return Err(DspError::DurationMismatch { expected: pitch_hz.len(), actual: energy.len() });
        }
        Ok(Self { pitch_hz, energy })
    }

    pub fn len(&self) -> usize {
        self.pitch_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pitch_hz.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TokenStats {
    pub duration_frames: usize,
    pub mean_pitch_hz: f64,
    pub mean_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TokenProsody {
    pub tokens: Vec<TokenStats>,
}

impl TokenProsody {
    pub fn total_frames(&self) -> usize {
        self.tokens.iter().map(|t| t.duration_frames).sum()
    }
}

/// Averages pitch and energy over each token's frame span.
///
/// Pitch is averaged over voiced frames only and is 0 when a span has none.
pub fn token_average(track: &ProsodyTrack, durations: &[usize]) -> Result<TokenProsody, DspError> {
    if let Some(i) = durations.iter().position(|&d| d == 0) {
        return Err(DspError::ZeroDuration(i));
    }
    let total: usize = durations.iter().sum();
    if total != track.len() {
        return Err(DspError::DurationMismatch { expected: track.len(), actual: total });
    }
    let mut start = 0;
    let tokens = durations
        .iter()
        .map(|&d| {
            let span = start..start + d;
            start += d;
            let voiced: Vec<f64> = track.pitch_hz[span.clone()].iter().copied().filter(|&p| p > 0.0).collect();
            let mean_pitch_hz = if voiced.is_empty() { 0.0 } else { voiced.iter().sum::<f64>() / voiced.len() as f64 };
            let mean_energy = track.energy[span].iter().sum::<f64>() / d as f64;
            TokenStats { duration_frames: d, mean_pitch_hz, mean_energy }
        })
        .collect();
    Ok(TokenProsody { tokens })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn track(pitch: &[f64], energy: &[f64]) -> ProsodyTrack {
        ProsodyTrack::new(pitch.to_vec(), energy.to_vec()).unwrap()
    }

    #[test]
    fn two_tokens() {
        let t = track(&[100.0, 100.0, 200.0, 200.0], &[1.0, 3.0, 5.0, 7.0]);
        let p = token_average(&t, &[2, 2]).unwrap();
        let pitch: Vec<_> = p.tokens.iter().map(|s| s.mean_pitch_hz).collect();
        let energy: Vec<_> = p.tokens.iter().map(|s| s.mean_energy).collect();
        assert_eq!(pitch, [100.0, 200.0]);
        assert_eq!(energy, [2.0, 6.0]);
        assert_eq!(p.total_frames(), 4);
    }

    #[test]
    fn single_token_is_global_mean() {
        let t = track(&[0.0, 120.0, 0.0, 180.0], &[1.0, 2.0, 3.0, 4.0]);
        let p = token_average(&t, &[4]).unwrap();
        assert_eq!(p.tokens[0].mean_pitch_hz, 150.0);
        assert_eq!(p.tokens[0].mean_energy, 2.5);
    }

    #[test]
    fn unvoiced_span_has_zero_pitch() {
        let t = track(&[0.0, 0.0, 110.0], &[0.0, 0.0, 1.0]);
        let p = token_average(&t, &[2, 1]).unwrap();
        assert_eq!(p.tokens[0].mean_pitch_hz, 0.0);
        assert_eq!(p.tokens[1].mean_pitch_hz, 110.0);
    }

    #[test]
    fn errors() {
        let t = track(&[0.0; 4], &[0.0; 4]);
        assert_eq!(token_average(&t, &[2, 1]), Err(DspError::DurationMismatch { expected: 4, actual: 3 }));
        assert_eq!(token_average(&t, &[4, 0]), Err(DspError::ZeroDuration(1)));
    }
}
