//! Energy endpointing: edge silence trimming and internal pause detection.
//!
//! Frames (25 ms, 10 ms hop) whose mean-square energy falls more than
//! `silence_floor_db` below the loudest frame are silent. Region edges are
//! then refined to the first/last sample whose amplitude clears the same
//! relative floor, so durations are not quantized to the hop size.

use serde::{Deserialize, Serialize};

use super::qc::{QcError, QcThresholds};
use super::wav::AudioBuffer;

pub const FRAME_MS: f64 = 25.0;
pub const HOP_MS: f64 = 10.0;

/// Peak frame energy at or below this (about -100 dBFS) counts as digital
/// silence.
const ABSOLUTE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pause {
    pub start: f64,
    pub end: f64,
}

impl Pause {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Endpoints {
    /// Seconds from the start to the first speech sample.
    pub leading_trim: f64,
    /// Seconds from the last speech sample to the end.
    pub trailing_trim: f64,
    pub pauses: Vec<Pause>,
    pub net_speech_duration: f64,
}

pub fn frame_geometry(sample_rate: u32) -> (usize, usize) {
    let sr = sample_rate as f64;
    let win = ((FRAME_MS / 1000.0 * sr).round() as usize).max(1);
    let hop = ((HOP_MS / 1000.0 * sr).round() as usize).max(1);
    (win, hop)
}

/// Frame start offsets covering every sample (the last frame may be short).
fn frame_starts(n: usize, win: usize, hop: usize) -> Vec<usize> {
    if n <= win {
        return vec![0];
    }
    let count = (n - win).div_ceil(hop) + 1;
    (0..count).map(|k| k * hop).collect()
}

pub fn endpoint(buf: &AudioBuffer, t: &QcThresholds) -> Result<Endpoints, QcError> {
    if buf.is_empty() {
        return Err(QcError::EmptyBuffer);
    }
    let x = &buf.samples;
    let n = x.len();
    let sr = buf.spec.sample_rate as f64;
    let (win, hop) = frame_geometry(buf.spec.sample_rate);
    let starts = frame_starts(n, win, hop);
    let range = |k: usize| starts[k]..(starts[k] + win).min(n);

    let energy: Vec<f64> = (0..starts.len())
        .map(|k| {
            let r = range(k);
            let len = r.len() as f64;
            x[r].iter().map(|&s| (s as f64) * (s as f64)).sum::<f64>() / len
        })
        .collect();
    let peak = energy.iter().copied().fold(0.0, f64::max);
    if peak <= ABSOLUTE_FLOOR {
        return Err(QcError::AllSilent);
    }
    let threshold = peak * 10f64.powf(t.silence_floor_db / 10.0);
    let amp = threshold.sqrt();
    let speech: Vec<bool> = energy.iter().map(|&e| e >= threshold).collect();
    let loud = |i: usize| (x[i] as f64).abs() >= amp;

    let first_loud_in = |k: usize| range(k).find(|&i| loud(i)).unwrap_or(range(k).start);
    let last_loud_in = |k: usize| range(k).rev().find(|&i| loud(i)).unwrap_or(range(k).end - 1);

    let speech_frames: Vec<usize> = (0..speech.len()).filter(|&k| speech[k]).collect();
    let first = speech_frames[0];
    let last = *speech_frames.last().unwrap();
    let start = first_loud_in(first);
    let end = last_loud_in(last) + 1;

    let min_pause = t.pause_min_ms / 1000.0;
    let mut pauses = Vec::new();
    for pair in speech_frames.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b == a + 1 {
            continue;
        }
        let p_start = last_loud_in(a) + 1;
        let p_end = first_loud_in(b);
        if p_end <= p_start {
            continue;
        }
        let pause = Pause {
            start: p_start as f64 / sr,
            end: p_end as f64 / sr,
        };
        if pause.duration() >= min_pause {
            pauses.push(pause);
        }
    }

    let paused: f64 = pauses.iter().map(Pause::duration).sum();
    Ok(Endpoints {
        leading_trim: start as f64 / sr,
        trailing_trim: (n - end) as f64 / sr,
        net_speech_duration: ((end - start) as f64 / sr - paused).max(0.0),
        pauses,
    })
}

/// The buffer with leading and trailing silence removed.
pub fn trim(buf: &AudioBuffer, t: &QcThresholds) -> Result<AudioBuffer, QcError> {
    let ep = endpoint(buf, t)?;
    let sr = buf.spec.sample_rate as f64;
    let start = (ep.leading_trim * sr).round() as usize;
    let end = buf.samples.len() - (ep.trailing_trim * sr).round() as usize;
    Ok(AudioBuffer {
        samples: buf.samples[start..end].to_vec(),
        spec: buf.spec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::testing::{silence, tone};

    fn concat(parts: &[Vec<f32>]) -> AudioBuffer {
        AudioBuffer::new(parts.concat(), 48_000)
    }

    #[test]
    fn padded_tone() {
        let buf = concat(&[silence(0.5), tone(2.0, 440.0, 0.5), silence(0.5)]);
        let ep = endpoint(&buf, &QcThresholds::default()).unwrap();
        assert!((ep.net_speech_duration - 2.0).abs() <= 0.010, "{ep:?}");
        assert!((ep.leading_trim - 0.5).abs() <= 0.010);
        assert!(ep.pauses.is_empty());
    }

    #[test]
    fn internal_gap_is_a_pause() {
        let buf = concat(&[
            silence(0.2),
            tone(1.0, 300.0, 0.5),
            silence(0.3),
            tone(1.0, 300.0, 0.5),
            silence(0.2),
        ]);
        let ep = endpoint(&buf, &QcThresholds::default()).unwrap();
        assert_eq!(ep.pauses.len(), 1);
        assert!((ep.pauses[0].duration() - 0.3).abs() <= 0.010);
        assert!((ep.net_speech_duration - 2.0).abs() <= 0.010);
    }

    #[test]
    fn short_gap_is_not_a_pause() {
        let buf = concat(&[tone(1.0, 300.0, 0.5), silence(0.1), tone(1.0, 300.0, 0.5)]);
        let ep = endpoint(&buf, &QcThresholds::default()).unwrap();
        assert!(ep.pauses.is_empty());
        assert!((ep.net_speech_duration - 2.1).abs() <= 0.010);
    }

    #[test]
    fn silence_errors() {
        let t = QcThresholds::default();
        assert!(matches!(endpoint(&concat(&[silence(1.0)]), &t), Err(QcError::AllSilent)));
        assert!(matches!(endpoint(&concat(&[]), &t), Err(QcError::EmptyBuffer)));
    }

    #[test]
    fn shorter_than_a_frame() {
        let buf = concat(&[tone(0.01, 1000.0, 0.5)]);
        let ep = endpoint(&buf, &QcThresholds::default()).unwrap();
        assert!(ep.net_speech_duration <= buf.duration());
        assert!(ep.net_speech_duration > 0.0);
    }

    #[test]
    fn trim_removes_edges() {
        let buf = concat(&[silence(0.25), tone(1.0, 440.0, 0.5), silence(0.75)]);
        let trimmed = trim(&buf, &QcThresholds::default()).unwrap();
        assert!((trimmed.duration() - 1.0).abs() <= 0.002);
    }
}
