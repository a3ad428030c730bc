use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::audio::{AudioBuffer, AudioSpec};

/// Floor applied to mel-band magnitudes before the log.
const LOG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CepstrumConfig {
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub n_mels: usize,
    /// Distance dimensions c1..cD; c0 is kept alongside.
    pub n_dims: usize,
    pub fmin: f64,
    /// Upper band edge in Hz; Nyquist when absent.
    pub fmax: Option<f64>,
    /// Endpoint-trim both signals before MCD.
    pub trim_silence: bool,
    /// Sakoe-Chiba half-width in frames; unconstrained when absent.
    pub band: Option<usize>,
}

impl Default for CepstrumConfig {
    fn default() -> Self {
        Self {
            frame_ms: 25.0,
            hop_ms: 10.0,
            n_mels: 40,
            n_dims: 24,
            fmin: 0.0,
            fmax: None,
            trim_silence: true,
            band: None,
        }
    }
}

impl CepstrumConfig {
    pub fn validate(&self) -> Result<(), MetricsError> {
        let bad = |m: &str| Err(MetricsError::InvalidConfig(m.to_string()));
        if !(self.frame_ms > 0.0 && self.hop_ms > 0.0) {
            return bad("frame_ms and hop_ms must be positive");
        }
        if self.n_mels == 0 || self.n_dims == 0 {
            return bad("n_mels and n_dims must be positive");
        }
        if self.n_dims >= self.n_mels {
            return bad("n_dims must be below n_mels");
        }
        if self.fmin < 0.0 || self.fmax.is_some_and(|f| f <= self.fmin) {
            return bad("band edges out of order");
        }
        Ok(())
    }
}

/// Frames of mel cepstra; each row holds c0..cD.
#[derive(Debug, Clone, PartialEq)]
pub struct MelCepstra {
    frames: Vec<Vec<f64>>,
    pub frame_hop_ms: f64,
    pub source_spec: AudioSpec,
}

impl MelCepstra {
    pub fn from_frames(
        frames: Vec<Vec<f64>>,
        frame_hop_ms: f64,
        source_spec: AudioSpec,
    ) -> Result<Self, MetricsError> {
        let width = frames.first().ok_or(MetricsError::EmptySequence)?.len();
        if width < 2 || frames.iter().any(|f| f.len() != width) {
            return Err(MetricsError::DimensionMismatch);
        }
        Ok(Self {
            frames,
            frame_hop_ms,
            source_spec,
        })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Number of distance dimensions (D).
    pub fn dims(&self) -> usize {
        self.frames[0].len() - 1
    }

    pub fn frames(&self) -> &[Vec<f64>] {
        &self.frames
    }

    pub fn c0(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f[0]).collect()
    }
}

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular HTK-mel filters over the bins of an `nfft`-point spectrum.
fn mel_filterbank(n_mels: usize, nfft: usize, sr: f64, fmin: f64, fmax: f64) -> Vec<Vec<f64>> {
    let (lo, hi) = (hz_to_mel(fmin), hz_to_mel(fmax));
    let edges: Vec<f64> = (0..n_mels + 2)
        .map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / (n_mels + 1) as f64))
        .collect();
    let bins = nfft / 2 + 1;
    (0..n_mels)
        .map(|m| {
            let (l, c, r) = (edges[m], edges[m + 1], edges[m + 2]);
            (0..bins)
                .map(|k| {
                    let f = k as f64 * sr / nfft as f64;
                    if f <= l || f >= r {
                        0.0
                    } else if f <= c {
                        (f - l) / (c - l)
                    } else {
                        (r - f) / (r - c)
                    }
                })
                .collect()
        })
        .collect()
}

/// Orthonormal DCT-II basis rows 0..k.
fn dct_basis(k: usize, n: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|q| {
            let scale = if q == 0 {
                (1.0 / n as f64).sqrt()
            } else {
                (2.0 / n as f64).sqrt()
            };
            (0..n)
                .map(|i| scale * (PI * q as f64 * (i as f64 + 0.5) / n as f64).cos())
                .collect()
        })
        .collect()
}

pub fn mel_cepstra(buf: &AudioBuffer, cfg: &CepstrumConfig) -> Result<MelCepstra, MetricsError> {
    cfg.validate()?;
    let sr = buf.spec.sample_rate as f64;
    let win = ((cfg.frame_ms / 1000.0 * sr).round() as usize).max(1);
    let hop = ((cfg.hop_ms / 1000.0 * sr).round() as usize).max(1);
    let n = buf.samples.len();
    if n < win {
        return Err(MetricsError::TooShort {
            samples: n,
            window: win,
        });
    }
    let nfft = win.next_power_of_two();
    let fmax = cfg.fmax.unwrap_or(sr / 2.0).min(sr / 2.0);
    let bank = mel_filterbank(cfg.n_mels, nfft, sr, cfg.fmin, fmax);
    let dct = dct_basis(cfg.n_dims + 1, cfg.n_mels);
    let window: Vec<f64> = (0..win)
        .map(|i| {
            if win == 1 {
                1.0
            } else {
                0.54 - 0.46 * (2.0 * PI * i as f64 / (win - 1) as f64).cos()
            }
        })
        .collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(nfft);

    let count = 1 + (n - win) / hop;
    let mut spectrum = vec![Complex::new(0.0, 0.0); nfft];
    let mut frames = Vec::with_capacity(count);
    for t in 0..count {
        let start = t * hop;
        for (i, slot) in spectrum.iter_mut().enumerate() {
            let v = if i < win {
                buf.samples[start + i] as f64 * window[i]
            } else {
                0.0
            };
            *slot = Complex::new(v, 0.0);
        }
        fft.process(&mut spectrum);
        let mag: Vec<f64> = spectrum[..nfft / 2 + 1].iter().map(|c| c.norm()).collect();
        let log_mel: Vec<f64> = bank
            .iter()
            .map(|w| {
                let e: f64 = w.iter().zip(&mag).map(|(a, b)| a * b).sum();
                e.max(LOG_FLOOR).ln()
            })
            .collect();
        frames.push(
            dct.iter()
                .map(|row| row.iter().zip(&log_mel).map(|(a, b)| a * b).sum())
                .collect(),
        );
    }
    MelCepstra::from_frames(frames, cfg.hop_ms, buf.spec)
}
