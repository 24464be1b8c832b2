//! Mono RIFF/WAVE encoding: 16-bit integer PCM or 32-bit IEEE float.
//!
//! Header layout (little-endian):
//!
//! ```text
//! "RIFF" u32(36 + data)  "WAVE"
//! "fmt " u32(16) u16(tag) u16(1) u32(rate) u32(rate*bytes) u16(bytes) u16(bits)
//! "data" u32(data) samples...
//! ```
//!
//! `tag` is 1 for 16-bit PCM and 3 for 32-bit float.

use std::path::Path;

use crate::error::{PidsError, Result};

/// 16-bit full scale. Symmetric, so -32768 is never written.
pub const PCM16_SCALE: f64 = 32767.0;

const FORMAT_PCM: u16 = 1;
const FORMAT_FLOAT: u16 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Int16,
    Float32,
}

impl BitDepth {
    pub fn bits(self) -> u16 {
        match self {
            BitDepth::Int16 => 16,
            BitDepth::Float32 => 32,
        }
    }

    fn tag(self) -> u16 {
        match self {
            BitDepth::Int16 => FORMAT_PCM,
            BitDepth::Float32 => FORMAT_FLOAT,
        }
    }

    fn bytes(self) -> usize {
        self.bits() as usize / 8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WavFormat {
    pub sample_rate: u32,
    pub bit_depth: BitDepth,
}

impl WavFormat {
    pub fn new(sample_rate: u32, bit_depth: BitDepth) -> Self {
        WavFormat {
            sample_rate,
            bit_depth,
        }
    }

    pub const fn channels(&self) -> u16 {
        1
    }
}

pub fn encode_pcm16(sample: f64) -> i16 {
    (sample.clamp(-1.0, 1.0) * PCM16_SCALE).round() as i16
}

pub fn decode_pcm16(value: i16) -> f64 {
    value as f64 / PCM16_SCALE
}

pub fn write_wav(samples: &[f64], format: WavFormat) -> Result<Vec<u8>> {
    if format.sample_rate == 0 {
        return Err(PidsError::Format("sample rate must be > 0".into()));
    }
    if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
        return Err(PidsError::Format(format!("sample {i} is not finite")));
    }
    let bytes = format.bit_depth.bytes();
    let data_len = samples.len() * bytes;
    let data_len_u32 = u32::try_from(data_len)
        .ok()
        .filter(|n| n.checked_add(36).is_some())
        .ok_or_else(|| PidsError::Format("signal too long for a RIFF file".into()))?;

    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len_u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&format.bit_depth.tag().to_le_bytes());
    out.extend_from_slice(&format.channels().to_le_bytes());
    out.extend_from_slice(&format.sample_rate.to_le_bytes());
    out.extend_from_slice(&(format.sample_rate * bytes as u32).to_le_bytes());
    out.extend_from_slice(&(bytes as u16).to_le_bytes());
    out.extend_from_slice(&format.bit_depth.bits().to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len_u32.to_le_bytes());
    match format.bit_depth {
        BitDepth::Int16 => {
            for &s in samples {
                out.extend_from_slice(&encode_pcm16(s).to_le_bytes());
            }
        }
        BitDepth::Float32 => {
            for &s in samples {
                out.extend_from_slice(&(s as f32).to_le_bytes());
            }
        }
    }
    Ok(out)
}

pub fn write_wav_file(path: impl AsRef<Path>, samples: &[f64], format: WavFormat) -> Result<()> {
    let bytes = write_wav(samples, format)?;
    std::fs::write(path, bytes)?;
    Ok(())
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

/// Decodes a mono 16-bit PCM or 32-bit float file. Unknown chunks are skipped.
pub fn read_wav(bytes: &[u8]) -> Result<(Vec<f64>, WavFormat)> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(PidsError::Format("missing RIFF/WAVE header".into()));
    }
    let mut fmt: Option<WavFormat> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body = pos + 8;
        let end = body
            .checked_add(size)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| {
                PidsError::Format(format!(
                    "chunk '{}' truncated",
                    String::from_utf8_lossy(id)
                ))
            })?;
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(PidsError::Format(format!("fmt chunk too short ({size} bytes)")));
                }
                let tag = u16_at(bytes, body);
                let channels = u16_at(bytes, body + 2);
                let rate = u32_at(bytes, body + 4);
                let bits = u16_at(bytes, body + 14);
                if channels != 1 {
                    return Err(PidsError::Format(format!(
                        "unsupported channel count {channels}; only mono is supported"
                    )));
                }
                let bit_depth = match (tag, bits) {
                    (FORMAT_PCM, 16) => BitDepth::Int16,
                    (FORMAT_FLOAT, 32) => BitDepth::Float32,
                    _ => {
                        return Err(PidsError::Format(format!(
                            "unsupported encoding (format tag {tag}, {bits} bits)"
                        )))
                    }
                };
                if rate == 0 {
                    return Err(PidsError::Format("sample rate is zero".into()));
                }
                fmt = Some(WavFormat::new(rate, bit_depth));
            }
            b"data" => {
                let format =
                    fmt.ok_or_else(|| PidsError::Format("data chunk before fmt chunk".into()))?;
                let data = &bytes[body..end];
                let samples = match format.bit_depth {
                    BitDepth::Int16 => data
                        .chunks_exact(2)
                        .map(|c| decode_pcm16(i16::from_le_bytes([c[0], c[1]])))
                        .collect(),
                    BitDepth::Float32 => data
                        .chunks_exact(4)
                        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
                        .collect(),
                };
                return Ok((samples, format));
            }
            _ => {}
        }
        // chunks are padded to even length
        pos = end + (size & 1);
    }
    Err(PidsError::Format("no data chunk".into()))
}

pub fn read_wav_file(path: impl AsRef<Path>) -> Result<(Vec<f64>, WavFormat)> {
    let bytes = std::fs::read(path)?;
    read_wav(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_pcm16_scaling() {
        assert_eq!(encode_pcm16(1.0), 32767);
        assert_eq!(encode_pcm16(-1.0), -32767);
        assert_eq!(encode_pcm16(0.5 / 32767.0), 1);
        assert_eq!(encode_pcm16(-0.5 / 32767.0), -1);
    }

    #[test]
    fn header_layout() {
        let bytes = write_wav(&vec![0.0; 44100], WavFormat::new(44100, BitDepth::Int16)).unwrap();
        assert_eq!(bytes.len(), 44 + 88200);
        assert_eq!(u32_at(&bytes, 40), 88200);
        assert_eq!(u32_at(&bytes, 4), 36 + 88200);
        assert_eq!(u16_at(&bytes, 20), 1);
        assert_eq!(u16_at(&bytes, 22), 1);
        assert_eq!(u32_at(&bytes, 24), 44100);
        assert_eq!(u32_at(&bytes, 28), 88200);
        assert_eq!(u16_at(&bytes, 32), 2);
        assert_eq!(u16_at(&bytes, 34), 16);

        let f = write_wav(&[0.25], WavFormat::new(48000, BitDepth::Float32)).unwrap();
        assert_eq!(u16_at(&f, 20), 3);
        assert_eq!(u16_at(&f, 34), 32);
        assert_eq!(&f[44..], &0.25f32.to_le_bytes());
    }

    #[test]
    fn float_round_trip_is_exact_on_f32_values() {
        let x: Vec<f64> = (0..1000).map(|i| ((i as f64) * 0.123).sin()).collect();
        let fmt = WavFormat::new(44100, BitDepth::Float32);
        let (y, f) = read_wav(&write_wav(&x, fmt).unwrap()).unwrap();
        assert_eq!(f, fmt);
        for (a, b) in x.iter().zip(&y) {
            assert_eq!((*a as f32).to_bits(), (*b as f32).to_bits());
            assert_eq!(*a as f32 as f64, *b);
        }
        // a second pass changes nothing
        let (z, _) = read_wav(&write_wav(&y, fmt).unwrap()).unwrap();
        assert_eq!(y, z);
    }

    #[test]
    fn rejects_bad_files() {
        let good = write_wav(&[0.1, 0.2, 0.3], WavFormat::new(44100, BitDepth::Int16)).unwrap();
        assert!(matches!(read_wav(&good[..30]), Err(PidsError::Format(_))));
        assert!(read_wav(&good[..good.len() - 1]).is_err());
        assert!(read_wav(b"RIFX....WAVE").is_err());

        let mut stereo = good.clone();
        stereo[22] = 2;
        let err = read_wav(&stereo).unwrap_err();
        assert!(err.to_string().contains("mono"), "{err}");

        let mut eight_bit = good.clone();
        eight_bit[34] = 8;
        assert!(read_wav(&eight_bit).is_err());

        assert!(write_wav(&[f64::NAN], WavFormat::new(44100, BitDepth::Int16)).is_err());
    }

    #[test]
    fn skips_unknown_chunks() {
        let good = write_wav(&[0.5, -0.5], WavFormat::new(8000, BitDepth::Int16)).unwrap();
        let mut with_list = good[..36].to_vec();
        with_list.extend_from_slice(b"LIST");
        with_list.extend_from_slice(&3u32.to_le_bytes());
        with_list.extend_from_slice(b"abc\0");
        with_list.extend_from_slice(&good[36..]);
        let (s, _) = read_wav(&with_list).unwrap();
        assert_eq!(s, vec![16384.0 / 32767.0, -16384.0 / 32767.0]);
    }
}
