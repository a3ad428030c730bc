//! RIFF/WAVE reading and writing.
//!
//! [`WavFile`] keeps every chunk verbatim so a parsed file serializes back to
//! the same bytes; [`AudioBuffer`] is the decoded, mono, normalized view.

use std::path::Path;

use serde::{Deserialize, Serialize};

const FORMAT_PCM: u16 = 0x0001;
const FORMAT_FLOAT: u16 = 0x0003;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

#[derive(Debug, thiserror::Error)]
pub enum WavError {
    #[error("not a RIFF/WAVE file")]
    NotRiff,
    #[error("unsupported codec (format tag {0:#06x})")]
    UnsupportedCodec(u16),
    #[error("chunk {chunk:?} declares {declared} bytes but only {available} are present")]
    TruncatedData {
        chunk: String,
        declared: usize,
        available: usize,
    },
    #[error("missing {0:?} chunk")]
    MissingChunk(&'static str),
    #[error("malformed fmt chunk: {0}")]
    BadFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Sample format of a recording.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AudioSpec {
    pub sample_rate: u32,
    pub bit_depth: u16,
    pub channels: u16,
}

impl AudioSpec {
    /// Studio delivery format: 48 kHz, 16-bit, mono.
    pub const STUDIO: AudioSpec = AudioSpec {
        sample_rate: 48_000,
        bit_depth: 16,
        channels: 1,
    };

    /// Human-readable differences from `expected`; empty when conforming.
    pub fn deviations(&self, expected: &AudioSpec) -> Vec<String> {
        let mut out = Vec::new();
        if self.sample_rate != expected.sample_rate {
            out.push(format!(
                "sample rate {} Hz, expected {} Hz",
                self.sample_rate, expected.sample_rate
            ));
        }
        if self.bit_depth != expected.bit_depth {
            out.push(format!(
                "bit depth {}, expected {}",
                self.bit_depth, expected.bit_depth
            ));
        }
        if self.channels != expected.channels {
            out.push(format!(
                "{} channels, expected {}",
                self.channels, expected.channels
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    Int,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WavFormat {
    pub kind: SampleKind,
    pub spec: AudioSpec,
    pub block_align: u16,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub id: [u8; 4],
    pub body: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WavFile {
    pub format: WavFormat,
    /// All chunks in file order, `fmt ` and `data` included.
    pub chunks: Vec<Chunk>,
}

fn u16_at(b: &[u8], i: usize) -> u16 {
    u16::from_le_bytes([b[i], b[i + 1]])
}

fn u32_at(b: &[u8], i: usize) -> u32 {
    u32::from_le_bytes([b[i], b[i + 1], b[i + 2], b[i + 3]])
}

fn parse_fmt(body: &[u8]) -> Result<WavFormat, WavError> {
    if body.len() < 16 {
        return Err(WavError::BadFormat(format!("{} bytes", body.len())));
    }
    let mut tag = u16_at(body, 0);
    let channels = u16_at(body, 2);
    let sample_rate = u32_at(body, 4);
    let block_align = u16_at(body, 12);
    let bit_depth = u16_at(body, 14);
    if tag == FORMAT_EXTENSIBLE {
        if body.len() < 40 {
            return Err(WavError::BadFormat("short extensible header".into()));
        }
        tag = u16_at(body, 24);
    }
    let kind = match tag {
        FORMAT_PCM => SampleKind::Int,
        FORMAT_FLOAT => SampleKind::Float,
        other => return Err(WavError::UnsupportedCodec(other)),
    };
    let valid = match kind {
        SampleKind::Int => matches!(bit_depth, 8 | 16 | 24 | 32),
        SampleKind::Float => matches!(bit_depth, 32 | 64),
    };
    if !valid || channels == 0 || sample_rate == 0 {
        return Err(WavError::BadFormat(format!(
            "{channels} channels, {sample_rate} Hz, {bit_depth} bits"
        )));
    }
    if block_align as usize != channels as usize * bit_depth as usize / 8 {
        return Err(WavError::BadFormat(format!("block align {block_align}")));
    }
    Ok(WavFormat {
        kind,
        spec: AudioSpec {
            sample_rate,
            bit_depth,
            channels,
        },
        block_align,
    })
}

impl WavFile {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, WavError> {
        if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
            return Err(WavError::NotRiff);
        }
        let riff_len = u32_at(bytes, 4) as usize;
        let end = (riff_len + 8).min(bytes.len());
        let mut chunks = Vec::new();
        let mut pos = 12;
        while pos + 8 <= end {
            let id: [u8; 4] = bytes[pos..pos + 4].try_into().unwrap();
            let len = u32_at(bytes, pos + 4) as usize;
            let start = pos + 8;
            if start + len > bytes.len() {
                return Err(WavError::TruncatedData {
                    chunk: String::from_utf8_lossy(&id).into_owned(),
                    declared: len,
                    available: bytes.len() - start,
                });
            }
            chunks.push(Chunk {
                id,
                body: bytes[start..start + len].to_vec(),
            });
            pos = start + len + (len & 1);
        }
        let fmt = chunks
            .iter()
            .find(|c| &c.id == b"fmt ")
            .ok_or(WavError::MissingChunk("fmt "))?;
        let format = parse_fmt(&fmt.body)?;
        let data = chunks
            .iter()
            .find(|c| &c.id == b"data")
            .ok_or(WavError::MissingChunk("data"))?;
        if data.body.len() % format.block_align as usize != 0 {
            return Err(WavError::TruncatedData {
                chunk: "data".into(),
                declared: data.body.len(),
                available: data.body.len() - data.body.len() % format.block_align as usize,
            });
        }
        Ok(WavFile { format, chunks })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let body_len: usize = self
            .chunks
            .iter()
            .map(|c| 8 + c.body.len() + (c.body.len() & 1))
            .sum();
        let mut out = Vec::with_capacity(12 + body_len);
        out.extend_from_slice(b"RIFF");
        out.extend_from_slice(&((4 + body_len) as u32).to_le_bytes());
        out.extend_from_slice(b"WAVE");
        for c in &self.chunks {
            out.extend_from_slice(&c.id);
            out.extend_from_slice(&(c.body.len() as u32).to_le_bytes());
            out.extend_from_slice(&c.body);
            if c.body.len() & 1 == 1 {
                out.push(0);
            }
        }
        out
    }

    pub fn data(&self) -> &[u8] {
        self.chunks
            .iter()
            .find(|c| &c.id == b"data")
            .map(|c| c.body.as_slice())
            .unwrap_or(&[])
    }

    /// Samples as interleaved values in [-1, 1].
    pub fn interleaved(&self) -> Vec<f32> {
        let data = self.data();
        let width = (self.format.spec.bit_depth / 8) as usize;
        data.chunks_exact(width)
            .map(|s| match (self.format.kind, width) {
                (SampleKind::Int, 1) => (s[0] as f32 - 128.0) / 128.0,
                (SampleKind::Int, 2) => i16::from_le_bytes([s[0], s[1]]) as f32 / 32768.0,
                (SampleKind::Int, 3) => {
                    let v = i32::from_le_bytes([0, s[0], s[1], s[2]]) >> 8;
                    v as f32 / 8_388_608.0
                }
                (SampleKind::Int, _) => {
                    (i32::from_le_bytes([s[0], s[1], s[2], s[3]]) as f64 / 2_147_483_648.0) as f32
                }
                (SampleKind::Float, 4) => f32::from_le_bytes([s[0], s[1], s[2], s[3]]),
                (SampleKind::Float, _) => f64::from_le_bytes(s.try_into().unwrap()) as f32,
            })
            .collect()
    }

    pub fn to_buffer(&self) -> AudioBuffer {
        let channels = self.format.spec.channels as usize;
        let inter = self.interleaved();
        let samples = if channels == 1 {
            inter
        } else {
            inter
                .chunks_exact(channels)
                .map(|f| f.iter().sum::<f32>() / channels as f32)
                .collect()
        };
        AudioBuffer {
            samples,
            spec: self.format.spec,
        }
    }
}

/// Decoded audio, mixed down to one channel, amplitudes in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    pub samples: Vec<f32>,
    /// Format of the source file (`channels` is the original count).
    pub spec: AudioSpec,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f32>, sample_rate: u32) -> Self {
        Self {
            samples,
            spec: AudioSpec {
                sample_rate,
                bit_depth: 16,
                channels: 1,
            },
        }
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.spec.sample_rate as f64
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Canonical 44-byte-header, 16-bit mono PCM encoding.
    pub fn to_wav_16bit(&self) -> WavFile {
        let rate = self.spec.sample_rate;
        let mut fmt = Vec::with_capacity(16);
        fmt.extend_from_slice(&FORMAT_PCM.to_le_bytes());
        fmt.extend_from_slice(&1u16.to_le_bytes());
        fmt.extend_from_slice(&rate.to_le_bytes());
        fmt.extend_from_slice(&(rate * 2).to_le_bytes());
        fmt.extend_from_slice(&2u16.to_le_bytes());
        fmt.extend_from_slice(&16u16.to_le_bytes());
        let data: Vec<u8> = self
            .samples
            .iter()
            .flat_map(|&x| {
                let v = (x as f64 * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                v.to_le_bytes()
            })
            .collect();
        WavFile {
            format: WavFormat {
                kind: SampleKind::Int,
                spec: AudioSpec {
                    sample_rate: rate,
                    bit_depth: 16,
                    channels: 1,
                },
                block_align: 2,
            },
            chunks: vec![
                Chunk {
                    id: *b"fmt ",
                    body: fmt,
                },
                Chunk { id: *b"data", body: data },
            ],
        }
    }
}

pub fn read_wav_file(path: impl AsRef<Path>) -> Result<WavFile, WavError> {
    WavFile::from_bytes(&std::fs::read(path)?)
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer, WavError> {
    Ok(read_wav_file(path)?.to_buffer())
}

pub fn write_wav(path: impl AsRef<Path>, buf: &AudioBuffer) -> Result<(), WavError> {
    std::fs::write(path, buf.to_wav_16bit().to_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical(samples: &[i16], rate: u32) -> Vec<u8> {
        let mut b = Vec::new();
        let data_len = samples.len() as u32 * 2;
        b.extend_from_slice(b"RIFF");
        b.extend_from_slice(&(36 + data_len).to_le_bytes());
        b.extend_from_slice(b"WAVEfmt ");
        b.extend_from_slice(&16u32.to_le_bytes());
        b.extend_from_slice(&1u16.to_le_bytes());
        b.extend_from_slice(&1u16.to_le_bytes());
        b.extend_from_slice(&rate.to_le_bytes());
        b.extend_from_slice(&(rate * 2).to_le_bytes());
        b.extend_from_slice(&2u16.to_le_bytes());
        b.extend_from_slice(&16u16.to_le_bytes());
        b.extend_from_slice(b"data");
        b.extend_from_slice(&data_len.to_le_bytes());
        for s in samples {
            b.extend_from_slice(&s.to_le_bytes());
        }
        b
    }

    #[test]
    fn parses_canonical_pcm() {
        let bytes = canonical(&[0, 16384, -32768, 32767], 48_000);
        let wav = WavFile::from_bytes(&bytes).unwrap();
        assert_eq!(wav.format.spec, AudioSpec::STUDIO);
        let buf = wav.to_buffer();
        assert_eq!(buf.samples, [0.0, 0.5, -1.0, 32767.0 / 32768.0]);
        assert!(buf.spec.deviations(&AudioSpec::STUDIO).is_empty());
        assert_eq!(wav.to_bytes(), bytes);
        assert_eq!(buf.to_wav_16bit().to_bytes(), bytes);
    }

    #[test]
    fn detects_format_deviation() {
        let wav = WavFile::from_bytes(&canonical(&[0; 10], 44_100)).unwrap();
        let dev = wav.format.spec.deviations(&AudioSpec::STUDIO);
        assert_eq!(dev, ["sample rate 44100 Hz, expected 48000 Hz"]);
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(WavFile::from_bytes(b"RIFX"), Err(WavError::NotRiff)));
        assert!(matches!(WavFile::from_bytes(b"RIFF\0\0\0\0AVI "), Err(WavError::NotRiff)));

        let mut bytes = canonical(&[1, 2, 3, 4], 48_000);
        bytes.truncate(bytes.len() - 3);
        assert!(matches!(
            WavFile::from_bytes(&bytes),
            Err(WavError::TruncatedData { declared: 8, available: 5, .. })
        ));

        let mut bytes = canonical(&[1, 2], 48_000);
        bytes[20] = 0x55; // MPEG layer 3
        assert!(matches!(WavFile::from_bytes(&bytes), Err(WavError::UnsupportedCodec(0x55))));
    }

    #[test]
    fn keeps_extra_chunks_verbatim() {
        let mut bytes = canonical(&[7, -7, 9], 48_000);
        // odd-length LIST chunk with its pad byte
        bytes.extend_from_slice(b"LIST\x03\x00\x00\x00abc\x00");
        let riff = (bytes.len() - 8) as u32;
        bytes[4..8].copy_from_slice(&riff.to_le_bytes());
        let wav = WavFile::from_bytes(&bytes).unwrap();
        assert_eq!(wav.chunks.len(), 3);
        assert_eq!(wav.to_bytes(), bytes);
    }

    #[test]
    fn stereo_is_mixed_down() {
        let mut bytes = canonical(&[16384, 0, -16384, -16384], 48_000);
        bytes[22] = 2; // channels
        bytes[32] = 4; // block align
        bytes[28..32].copy_from_slice(&(48_000u32 * 4).to_le_bytes());
        let buf = WavFile::from_bytes(&bytes).unwrap().to_buffer();
        assert_eq!(buf.samples, [0.25, -0.5]);
        assert_eq!(buf.spec.channels, 2);
        assert_eq!(buf.duration(), 2.0 / 48_000.0);
    }
}
