//! RIFF/WAVE PCM16 mono encoding and decoding.

use std::io::Cursor;
use std::path::Path;

use thiserror::Error;

use crate::dsp::Waveform;

#[derive(Debug, Error)]
pub enum WavError {
    #[error("wav: {0}")]
    Format(#[from] hound::Error),
    #[error("expected mono audio, found {0} channels")]
    NotMono(u16),
    #[error("invalid waveform: {0}")]
    Waveform(#[from] crate::dsp::DspError),
}

fn spec(sample_rate: u32) -> hound::WavSpec {
    hound::WavSpec { channels: 1, sample_rate, bits_per_sample: 16, sample_format: hound::SampleFormat::Int }
}

/// Quantizes one sample: clamp to `[-1, 1]`, scale by 32767, round half away from zero.
pub fn quantize(sample: f32) -> i16 {
    let s = if sample.is_nan() { 0.0 } else { sample.clamp(-1.0, 1.0) as f64 };
    (s * 32767.0).round() as i16
}

/// Encodes as a 44-byte-header PCM16 mono WAV at the waveform's sample rate.
pub fn encode_wav(wave: &Waveform) -> Vec<u8> {
    let mut cursor = Cursor::new(Vec::with_capacity(44 + 2 * wave.len()));
    {
        let mut writer =
            hound::WavWriter::new(&mut cursor, spec(wave.sample_rate())).expect("writing to memory cannot fail");
        let mut samples = writer.get_i16_writer(wave.len() as u32);
        for &s in wave.samples() {
            samples.write_sample(quantize(s));
        }
        samples.flush().expect("writing to memory cannot fail");
        writer.finalize().expect("writing to memory cannot fail");
    }
    cursor.into_inner()
}

/// Decodes a mono WAV of any integer or float sample format to `[-1, 1]`.
pub fn decode_wav(bytes: &[u8]) -> Result<Waveform, WavError> {
    read(hound::WavReader::new(Cursor::new(bytes))?)
}

pub fn read_wav_file(path: &Path) -> Result<Waveform, WavError> {
    read(hound::WavReader::open(path)?)
}

fn read<R: std::io::Read>(reader: hound::WavReader<R>) -> Result<Waveform, WavError> {
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(WavError::NotMono(spec.channels));
    }
    let samples: Vec<f32> = match spec.sample_format {
        hound::SampleFormat::Float => reader.into_samples::<f32>().collect::<Result<_, _>>()?,
        hound::SampleFormat::Int => {
            let scale = 1.0 / (1u64 << (spec.bits_per_sample - 1)) as f32;
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| (v as f32 * scale).clamp(-1.0, 1.0)))
                .collect::<Result<_, _>>()?
        }
    };
    Ok(Waveform::from_unchecked(samples, spec.sample_rate))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_wave_is_bare_header() {
        let bytes = encode_wav(&Waveform::silence(0, 24_000));
        assert_eq!(bytes.len(), 44);
        assert_eq!(&bytes[40..44], &[0, 0, 0, 0]);
    }

    #[test]
    fn three_sample_file_byte_exact() {
        let w = Waveform::new(vec![1.0, -1.0, 0.5], 24_000).unwrap();
        let mut expected = Vec::new();
        expected.extend_from_slice(b"RIFF");
        expected.extend_from_slice(&42u32.to_le_bytes()); // 36 + 6 data bytes
        expected.extend_from_slice(b"WAVEfmt ");
        expected.extend_from_slice(&16u32.to_le_bytes());
        expected.extend_from_slice(&1u16.to_le_bytes()); // PCM
        expected.extend_from_slice(&1u16.to_le_bytes()); // mono
        expected.extend_from_slice(&24_000u32.to_le_bytes());
        expected.extend_from_slice(&48_000u32.to_le_bytes()); // byte rate
        expected.extend_from_slice(&2u16.to_le_bytes()); // block align
        expected.extend_from_slice(&16u16.to_le_bytes());
        expected.extend_from_slice(b"data");
        expected.extend_from_slice(&6u32.to_le_bytes());
        expected.extend_from_slice(&[0xff, 0x7f, 0x01, 0x80, 0x00, 0x40]);
        assert_eq!(expected.len(), 50);
        assert_eq!(encode_wav(&w), expected);
    }

    #[test]
    fn quantization_rounds_half_away_from_zero() {
        assert_eq!(quantize(1.0), 0x7fff);
        assert_eq!(quantize(-1.0), -0x7fff);
        assert_eq!(quantize(2.0), 0x7fff);
        assert_eq!(quantize(0.5), 16384); // 16383.5
        assert_eq!(quantize(-0.5), -16384);
        assert_eq!(quantize(f32::NAN), 0);
    }

    #[test]
    fn decode_round_trip() {
        let w = Waveform::new(vec![0.25, -0.75, 0.0, 1.0], 24_000).unwrap();
        let back = decode_wav(&encode_wav(&w)).unwrap();
        assert_eq!(back.sample_rate(), 24_000);
        for (a, b) in w.samples().iter().zip(back.samples()) {
            assert!((a - b).abs() < 1e-4);
        }
    }
}
