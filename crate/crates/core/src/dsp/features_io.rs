//! Flat little-endian f32 feature files with a JSON sidecar.

use std::io::{self, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::MelConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackShape {
    pub file: String,
    /// Row-major dimensions, e.g. `[T, 80]` or `[T]`.
    pub shape: Vec<usize>,
}

/// Describes the feature files written for one utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSidecar {
    pub id: String,
    pub dtype: String,
    pub layout: String,
    pub mel_config: MelConfig,
    pub sample_rate: u32,
    pub num_samples: usize,
    pub mel: TrackShape,
    pub pitch: TrackShape,
    pub energy: TrackShape,
}

impl FeatureSidecar {
    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut json = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        json.push('\n');
        std::fs::write(path, json)
    }

    pub fn read(path: &Path) -> io::Result<Self> {
        serde_json::from_str(&std::fs::read_to_string(path)?).map_err(io::Error::other)
    }
}

pub fn write_f32_le<W: Write>(mut out: W, values: impl IntoIterator<Item = f64>) -> io::Result<()> {
    let bytes: Vec<u8> = values.into_iter().flat_map(|v| (v as f32).to_le_bytes()).collect();
    out.write_all(&bytes)
}

pub fn read_f32_le<R: Read>(mut input: R) -> io::Result<Vec<f32>> {
    let mut buf = Vec::new();
    input.read_to_end(&mut buf)?;
    if buf.len() % 4 != 0 {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "length is not a multiple of 4"));
    }
    Ok(buf.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn little_endian_layout() {
        let mut buf = Vec::new();
        write_f32_le(&mut buf, [1.0, -2.5]).unwrap();
        assert_eq!(buf, [0, 0, 0x80, 0x3f, 0, 0, 0x20, 0xc0]);
        assert_eq!(read_f32_le(&buf[..]).unwrap(), [1.0, -2.5]);
        assert!(read_f32_le(&buf[..3]).is_err());
    }
}
