//! Energy-gate voice activity detection and silence trimming.
//!
//! Frames are 30 ms and non-overlapping; a trailing partial frame is its own
//! frame. A frame is speech when its RMS level in dBFS exceeds the
//! 10th-percentile frame level by `gate_db` and sits above an absolute
//! silence floor. If the loudest frame is less than `gate_db` above the
//! percentile, the signal has no usable dynamic range and every frame above
//! the floor is speech. A hangover then extends each speech run by a few
//! frames.

use super::{DspError, Waveform};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VadConfig {
    pub frame_ms: u32,
    /// Gate offset above the percentile level, in dB. Higher is less aggressive.
    pub gate_db: f64,
    pub percentile: f64,
    pub hangover_frames: usize,
    /// Frames at or below this level are never speech.
    pub silence_floor_dbfs: f64,
}

impl Default for VadConfig {
    fn default() -> Self {
        Self { frame_ms: 30, gate_db: 6.0, percentile: 0.10, hangover_frames: 3, silence_floor_dbfs: -70.0 }
    }
}

/// Per-frame decisions. `gated` is the raw threshold decision, `speech`
/// includes hangover.
#[derive(Debug, Clone, PartialEq)]
pub struct VoiceActivity {
    pub frame_len: usize,
    pub levels_dbfs: Vec<f64>,
    pub gated: Vec<bool>,
    pub speech: Vec<bool>,
}

impl VoiceActivity {
    pub fn speech_frames(&self) -> usize {
        self.speech.iter().filter(|&&s| s).count()
    }
}

fn dbfs(samples: &[f32]) -> f64 {
    let mean_sq = samples.iter().map(|&s| (s as f64) * (s as f64)).sum::<f64>() / samples.len() as f64;
    20.0 * mean_sq.sqrt().max(1e-10).log10()
}

pub fn detect_voice_activity(wave: &Waveform) -> Result<VoiceActivity, DspError> {
    detect_voice_activity_with(wave, &VadConfig::default())
}

pub fn detect_voice_activity_with(wave: &Waveform, cfg: &VadConfig) -> Result<VoiceActivity, DspError> {
    let frame_len = (wave.sample_rate() as usize * cfg.frame_ms as usize / 1000).max(1);
    if wave.len() < frame_len {
        return Err(DspError::TooShort { needed: frame_len });
    }
    let levels: Vec<f64> = wave.samples().chunks(frame_len).map(dbfs).collect();

    let mut sorted = levels.clone();
    sorted.sort_by(f64::total_cmp);
    // nearest-rank percentile
    let rank = ((cfg.percentile * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    let reference = sorted[rank - 1];
    let loudest = *sorted.last().unwrap();
    let flat = loudest - reference < cfg.gate_db;

    let gated: Vec<bool> =
        levels.iter().map(|&db| db > cfg.silence_floor_dbfs && (flat || db > reference + cfg.gate_db)).collect();

    let mut speech = gated.clone();
    let mut since_speech = usize::MAX;
    for (i, &g) in gated.iter().enumerate() {
        if g {
            since_speech = 0;
        } else if since_speech < cfg.hangover_frames {
            since_speech += 1;
            speech[i] = true;
        } else {
            since_speech = usize::MAX;
        }
    }
    Ok(VoiceActivity { frame_len, levels_dbfs: levels, gated, speech })
}

/// Removes leading and trailing non-speech frames, keeping interior silence.
///
/// The cut points come from the gate decisions; hangover frames only
/// smooth interior gaps and do not extend the kept span.
pub fn trim_silence(wave: &Waveform) -> Result<Waveform, DspError> {
    let vad = detect_voice_activity(wave)?;
    let first = vad.gated.iter().position(|&s| s).ok_or(DspError::NoSpeechDetected)?;
    let last = vad.gated.iter().rposition(|&s| s).unwrap();
    let start = first * vad.frame_len;
    let end = ((last + 1) * vad.frame_len).min(wave.len());
    Ok(wave.slice(start, end))
}
