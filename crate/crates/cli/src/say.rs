use std::fmt::Write;

use voxsync_core::synth::{Rendered, Voice, VoiceError};
use voxsync_core::wav::encode_wav;

/// Renders `text` and returns the diagnostics and WAV bytes.
pub fn say(voice: &Voice, text: &str) -> Result<(Rendered, Vec<u8>), VoiceError> {
    let rendered = voice.render(text)?;
    let wav = encode_wav(&rendered.wave);
    Ok((rendered, wav))
}

/// One `word  source  phones` row per word, then the full unit sequence.
pub fn describe(rendered: &Rendered) -> String {
    let mut out = String::new();
    let width = rendered.phonemes.words().iter().map(|w| w.word.len()).max().unwrap_or(0);
    for w in rendered.phonemes.words() {
        let phones: Vec<&str> = w.phones.iter().map(|p| p.symbol()).collect();
        let _ = writeln!(out, "{:<width$}  {:<6}  {}", w.word, w.source.as_str(), phones.join(" "));
    }
    let _ = writeln!(out, "phonemes: {}", rendered.phonemes);
    let _ = writeln!(
        out,
        "samples: {} ({:.3} s at {} Hz)",
        rendered.wave.len(),
        rendered.wave.duration_secs(),
        rendered.wave.sample_rate()
    );
    out
}
