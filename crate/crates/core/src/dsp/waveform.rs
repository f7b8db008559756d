use super::DspError;

/// Mono audio with finite samples in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f32>,
    sample_rate: u32,
}

impl Waveform {
    pub const DEFAULT_SAMPLE_RATE: u32 = 24_000;

    pub fn new(samples: Vec<f32>, sample_rate: u32) -> Result<Self, DspError> {
        if sample_rate == 0 {
            return Err(DspError::InvalidConfig("sample_rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite() || s.abs() > 1.0) {
            return Err(DspError::InvalidSample(i));
        }
        Ok(Self { samples, sample_rate })
    }

    /// Builds a waveform, clamping out-of-range values and zeroing non-finite ones.
    pub fn from_unchecked(samples: impl IntoIterator<Item = f32>, sample_rate: u32) -> Self {
        let samples = samples.into_iter().map(|s| if s.is_finite() { s.clamp(-1.0, 1.0) } else { 0.0 }).collect();
        Self { samples, sample_rate: sample_rate.max(1) }
    }

    pub fn silence(len: usize, sample_rate: u32) -> Self {
        Self { samples: vec![0.0; len], sample_rate }
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f32> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn slice(&self, start: usize, end: usize) -> Waveform {
        Waveform { samples: self.samples[start..end].to_vec(), sample_rate: self.sample_rate }
    }

    /// Scales every sample by `gain`, clamping into range.
    pub fn scaled(&self, gain: f32) -> Waveform {
        Self::from_unchecked(self.samples.iter().map(|s| s * gain), self.sample_rate)
    }

    pub fn peak(&self) -> f32 {
        self.samples.iter().fold(0.0f32, |m, s| m.max(s.abs()))
    }

    pub fn rms(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let sum: f64 = self.samples.iter().map(|&s| (s as f64) * (s as f64)).sum();
        (sum / self.samples.len() as f64).sqrt()
    }
}
