//! Objective and subjective evaluation: DTW-aligned mel-cepstral distortion
//! and listening-test aggregation.

mod cepstrum;
mod dtw;
mod listening;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use cepstrum::{mel_cepstra, CepstrumConfig, MelCepstra};
pub use dtw::{dtw, dtw_align, frame_distance, Alignment};
pub use listening::{
    dmos_aggregate, dmos_per_evaluator, load_ratings, mos_aggregate, read_ratings, systems,
    Condition, Rating,
};

use crate::audio::{trim, AudioBuffer, QcError, QcThresholds};
use crate::summary::MeanStd;

/// 10 / ln 10: converts natural-log cepstral distance to dB.
pub const DB_PER_NEPER: f64 = 10.0 / std::f64::consts::LN_10;

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("signal has {samples} samples, shorter than one {window}-sample window")]
    TooShort { samples: usize, window: usize },
    #[error("empty cepstral sequence")]
    EmptySequence,
    #[error("cepstral sequences have different dimensions")]
    DimensionMismatch,
    #[error("alignment band is too narrow to reach the end of both sequences")]
    BandTooNarrow,
    #[error("invalid analysis config: {0}")]
    InvalidConfig(String),
    #[error("no ratings for system {0:?}")]
    NoRatings(String),
    #[error("evaluator {evaluator:?} has no {condition:?} ratings")]
    MissingCondition {
        evaluator: String,
        condition: Condition,
    },
    #[error("line {line}: score {score} is outside 1..=5")]
    InvalidScore { line: usize, score: u8 },
    #[error("no values to aggregate")]
    EmptyInput,
    #[error(transparent)]
    Qc(#[from] QcError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    McdDb,
    Mos,
    Dmos,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::McdDb => "MCD dB",
            Metric::Mos => "MOS",
            Metric::Dmos => "DMOS",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub system: String,
    pub metric: Metric,
    pub mean: f64,
    pub std: f64,
    /// Distinct evaluators; absent for objective metrics.
    pub n_evaluators: Option<usize>,
    pub n_items: usize,
}

impl MetricReport {
    /// Count shown in parentheses: evaluators, or items when there are none.
    pub fn n(&self) -> usize {
        self.n_evaluators.unwrap_or(self.n_items)
    }
}

impl fmt::Display for MetricReport {
    /// `mean±std (n)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ms = MeanStd {
            mean: self.mean,
            std: self.std,
            n: self.n(),
        };
        write!(f, "{ms} ({})", self.n())
    }
}

/// Plain-text table, one `system  metric  mean±std (n)` row per report.
pub fn render_table(reports: &[MetricReport]) -> String {
    let width = reports.iter().map(|r| r.system.len()).max().unwrap_or(0).max(6);
    let mut out = format!("{:<width$}  {:<6}  mean±std (n)\n", "system", "metric");
    for r in reports {
        out.push_str(&format!("{:<width$}  {:<6}  {r}\n", r.system, r.metric.to_string()));
    }
    out
}

/// Per-pair distortions in dB along an alignment.
pub fn pair_distortions(al: &Alignment) -> Vec<f64> {
    al.distances
        .iter()
        .map(|d| DB_PER_NEPER * std::f64::consts::SQRT_2 * d)
        .collect()
}

/// Mel-cepstral distortion averaged over the aligned pairs.
pub fn mcd(reference: &MelCepstra, synthesized: &MelCepstra, band: Option<usize>) -> Result<f64, MetricsError> {
    let al = dtw_align(reference, synthesized, band)?;
    let per = pair_distortions(&al);
    Ok(per.iter().sum::<f64>() / per.len() as f64)
}

fn prepare(buf: &AudioBuffer, cfg: &CepstrumConfig) -> Result<MelCepstra, MetricsError> {
    let trimmed = if cfg.trim_silence {
        match trim(buf, &QcThresholds::default()) {
            Ok(t) => t,
            Err(QcError::AllSilent) => buf.clone(),
            Err(e) => return Err(e.into()),
        }
    } else {
        buf.clone()
    };
    mel_cepstra(&trimmed, cfg)
}

/// MCD between two recordings, trimming edge silence first when configured.
pub fn mcd_audio(
    reference: &AudioBuffer,
    synthesized: &AudioBuffer,
    cfg: &CepstrumConfig,
) -> Result<f64, MetricsError> {
    let r = prepare(reference, cfg)?;
    let s = prepare(synthesized, cfg)?;
    mcd(&r, &s, cfg.band)
}

/// Test-set summary over per-file MCD values.
pub fn mcd_report(system: &str, values: &[f64]) -> Result<MetricReport, MetricsError> {
    let s = MeanStd::of(values).ok_or(MetricsError::EmptyInput)?;
    Ok(MetricReport {
        system: system.to_string(),
        metric: Metric::McdDb,
        mean: s.mean,
        std: s.std,
        n_evaluators: None,
        n_items: values.len(),
    })
}
