use std::path::Path;

use serde::{Deserialize, Serialize};

use super::endpoint::{endpoint, Endpoints, Pause};
use super::wav::{read_wav, AudioBuffer, AudioSpec, WavError};
use crate::script::{analyze_sentence, LanguageConfig, Mode};
use crate::summary::MeanStd;

#[derive(Debug, thiserror::Error)]
pub enum QcError {
    #[error("audio buffer is empty")]
    EmptyBuffer,
    #[error("no speech found: every frame is silent")]
    AllSilent,
    #[error("net speech duration is zero")]
    ZeroSpeechDuration,
    #[error("no reports to summarize")]
    EmptyInput,
    #[error("invalid QC thresholds: {0}")]
    InvalidThresholds(String),
    #[error(transparent)]
    Wav(#[from] WavError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QcThresholds {
    /// Accepted syllables/second, inclusive at both ends.
    pub rate_band: [f64; 2],
    /// Silence floor relative to the loudest frame, in dB.
    pub silence_floor_db: f64,
    pub pause_min_ms: f64,
    pub clip_level: f64,
    pub clip_ratio_max: f64,
}

impl Default for QcThresholds {
    fn default() -> Self {
        Self {
            rate_band: [6.0, 8.0],
            silence_floor_db: -40.0,
            pause_min_ms: 200.0,
            clip_level: 0.999,
            clip_ratio_max: 0.0001,
        }
    }
}

impl QcThresholds {
    pub fn validate(&self) -> Result<(), QcError> {
        let all = [
            self.rate_band[0],
            self.rate_band[1],
            self.silence_floor_db,
            self.pause_min_ms,
            self.clip_level,
            self.clip_ratio_max,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(QcError::InvalidThresholds("non-finite value".into()));
        }
        if self.rate_band[0] >= self.rate_band[1] {
            return Err(QcError::InvalidThresholds(format!(
                "rate band {:?} is empty",
                self.rate_band
            )));
        }
        Ok(())
    }

    pub fn in_band(&self, rate: f64) -> bool {
        (self.rate_band[0]..=self.rate_band[1]).contains(&rate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum QcReason {
    FormatMismatch { issues: Vec<String> },
    OutOfBand { rate: f64 },
    Clipping { ratio: f64 },
    AllSilent,
    Unreadable { error: String },
    TranscriptRejected { error: String },
}

impl QcReason {
    fn severity(&self, strict: bool) -> Verdict {
        match self {
            QcReason::FormatMismatch { .. } if !strict => Verdict::Warn,
            QcReason::OutOfBand { .. } => Verdict::Warn,
            _ => Verdict::Fail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcReport {
    pub utt_id: String,
    pub format_ok: bool,
    pub duration: f64,
    pub net_speech_duration: f64,
    pub pauses: Vec<Pause>,
    pub syllable_count: usize,
    /// Absent when there was no measurable speech.
    pub syllable_rate: Option<f64>,
    pub clip_ratio: f64,
    pub verdict: Verdict,
    pub reasons: Vec<QcReason>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCheck {
    pub rate: f64,
    pub in_band: bool,
}

/// Syllables per second of net speech.
pub fn syllable_rate(
    syllable_count: usize,
    endpoints: &Endpoints,
    t: &QcThresholds,
) -> Result<RateCheck, QcError> {
    if endpoints.net_speech_duration <= 0.0 {
        return Err(QcError::ZeroSpeechDuration);
    }
    let rate = syllable_count as f64 / endpoints.net_speech_duration;
    Ok(RateCheck {
        rate,
        in_band: t.in_band(rate),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClipCheck {
    pub ratio: f64,
    pub pass: bool,
}

pub fn clip_check(buf: &AudioBuffer, t: &QcThresholds) -> ClipCheck {
    if buf.is_empty() {
        return ClipCheck {
            ratio: 0.0,
            pass: true,
        };
    }
    let clipped = buf
        .samples
        .iter()
        .filter(|&&s| (s as f64).abs() >= t.clip_level)
        .count();
    let ratio = clipped as f64 / buf.samples.len() as f64;
    ClipCheck {
        ratio,
        pass: ratio <= t.clip_ratio_max,
    }
}

/// Verdict from the numeric fields alone: the worst reason wins.
pub fn decide(reasons: &[QcReason], strict: bool) -> Verdict {
    reasons
        .iter()
        .map(|r| r.severity(strict))
        .max()
        .unwrap_or(Verdict::Pass)
}

/// Collects the reasons implied by a report's measurements.
pub fn reasons_for(
    format_issues: &[String],
    syllable_rate: Option<f64>,
    clip_ratio: f64,
    t: &QcThresholds,
) -> Vec<QcReason> {
    let mut reasons = Vec::new();
    if !format_issues.is_empty() {
        reasons.push(QcReason::FormatMismatch {
            issues: format_issues.to_vec(),
        });
    }
    if let Some(rate) = syllable_rate {
        if !t.in_band(rate) {
            reasons.push(QcReason::OutOfBand { rate });
        }
    }
    if clip_ratio > t.clip_ratio_max {
        reasons.push(QcReason::Clipping { ratio: clip_ratio });
    }
    reasons
}

/// Checks one decoded utterance against its syllable count.
pub fn qc_buffer(
    utt_id: &str,
    buf: &AudioBuffer,
    syllable_count: usize,
    expected: &AudioSpec,
    strict: bool,
    t: &QcThresholds,
) -> QcReport {
    let issues = buf.spec.deviations(expected);
    let clip = clip_check(buf, t);
    let mut report = QcReport {
        utt_id: utt_id.to_string(),
        format_ok: issues.is_empty(),
        duration: buf.duration(),
        net_speech_duration: 0.0,
        pauses: Vec::new(),
        syllable_count,
        syllable_rate: None,
        clip_ratio: clip.ratio,
        verdict: Verdict::Pass,
        reasons: Vec::new(),
    };
    let silent = match endpoint(buf, t) {
        Ok(ep) => {
            report.net_speech_duration = ep.net_speech_duration;
            report.syllable_rate = syllable_rate(syllable_count, &ep, t).ok().map(|r| r.rate);
            report.pauses = ep.pauses;
            report.syllable_rate.is_none()
        }
        Err(_) => true,
    };
    report.reasons = reasons_for(&issues, report.syllable_rate, clip.ratio, t);
    if silent {
        report.reasons.push(QcReason::AllSilent);
    }
    report.verdict = decide(&report.reasons, strict);
    report
}

/// Reads, analyzes and checks one manifest entry. Never fails: problems
/// become `fail` reasons on the report.
pub fn qc_file(
    utt_id: &str,
    wav_path: &Path,
    transcript: &str,
    cfg: &LanguageConfig,
    mode: Mode,
    t: &QcThresholds,
) -> QcReport {
    let strict = mode == Mode::Strict;
    let syllables = analyze_sentence(utt_id, transcript, cfg, mode).map(|r| r.syllable_count);
    let mut report = match read_wav(wav_path) {
        Ok(buf) => qc_buffer(
            utt_id,
            &buf,
            *syllables.as_ref().unwrap_or(&0),
            &AudioSpec::STUDIO,
            strict,
            t,
        ),
        Err(e) => QcReport {
            utt_id: utt_id.to_string(),
            format_ok: false,
            duration: 0.0,
            net_speech_duration: 0.0,
            pauses: Vec::new(),
            syllable_count: 0,
            syllable_rate: None,
            clip_ratio: 0.0,
            verdict: Verdict::Fail,
            reasons: vec![QcReason::Unreadable {
                error: e.to_string(),
            }],
        },
    };
    if let Err(rej) = syllables {
        report.syllable_rate = None;
        report
            .reasons
            .retain(|r| !matches!(r, QcReason::OutOfBand { .. }));
        report.reasons.push(QcReason::TranscriptRejected {
            error: rej.reason.to_string(),
        });
        report.verdict = decide(&report.reasons, strict);
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    pub rate: MeanStd,
    pub out_of_band: usize,
    /// `mean±std` with two decimals.
    pub display: String,
}

/// Mean and population standard deviation of per-utterance rates.
/// Reports without a rate are skipped.
pub fn dataset_rate_summary(
    reports: &[QcReport],
    t: &QcThresholds,
) -> Result<RateSummary, QcError> {
    let rates: Vec<f64> = reports.iter().filter_map(|r| r.syllable_rate).collect();
    let rate = MeanStd::of(&rates).ok_or(QcError::EmptyInput)?;
    Ok(RateSummary {
        rate,
        out_of_band: rates.iter().filter(|&&r| !t.in_band(r)).count(),
        display: rate.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::testing::{silence, tone};

    fn report_with_rate(rate: f64) -> QcReport {
        QcReport {
            utt_id: "u".into(),
            format_ok: true,
            duration: 1.0,
            net_speech_duration: 1.0,
            pauses: vec![],
            syllable_count: 0,
            syllable_rate: Some(rate),
            clip_ratio: 0.0,
            verdict: Verdict::Pass,
            reasons: vec![],
        }
    }

    #[test]
    fn rate_verdicts() {
        let buf = AudioBuffer::new([silence(0.5), tone(2.0, 220.0, 0.5), silence(0.5)].concat(), 48_000);
        let t = QcThresholds::default();
        let r = qc_buffer("a", &buf, 14, &AudioSpec::STUDIO, true, &t);
        assert!((r.syllable_rate.unwrap() - 7.0).abs() < 0.1);
        assert_eq!(r.verdict, Verdict::Pass);

        let buf = AudioBuffer::new([silence(0.5), tone(1.0, 220.0, 0.5), silence(0.5)].concat(), 48_000);
        let r = qc_buffer("b", &buf, 14, &AudioSpec::STUDIO, true, &t);
        assert!((r.syllable_rate.unwrap() - 14.0).abs() < 0.2);
        assert_eq!(r.verdict, Verdict::Warn);
        assert!(matches!(r.reasons[0], QcReason::OutOfBand { .. }));
    }

    #[test]
    fn band_is_inclusive() {
        let t = QcThresholds::default();
        for (rate, v) in [(5.999, Verdict::Warn), (6.0, Verdict::Pass), (8.0, Verdict::Pass), (8.001, Verdict::Warn)] {
            assert_eq!(decide(&reasons_for(&[], Some(rate), 0.0, &t), true), v, "{rate}");
        }
    }

    #[test]
    fn zero_duration_is_an_error() {
        let ep = Endpoints {
            leading_trim: 0.0,
            trailing_trim: 0.0,
            pauses: vec![],
            net_speech_duration: 0.0,
        };
        assert!(matches!(
            syllable_rate(3, &ep, &QcThresholds::default()),
            Err(QcError::ZeroSpeechDuration)
        ));
    }

    #[test]
    fn clipping() {
        let t = QcThresholds::default();
        let full = AudioBuffer::new(vec![1.0; 100], 48_000);
        let c = clip_check(&full, &t);
        assert_eq!((c.ratio, c.pass), (1.0, false));

        let half = AudioBuffer::new(tone(1.0, 1000.0, 0.5), 48_000);
        let c = clip_check(&half, &t);
        assert_eq!((c.ratio, c.pass), (0.0, true));

        let mut one = tone(1.0, 1000.0, 0.5);
        one[100] = -1.0;
        let c = clip_check(&AudioBuffer::new(one, 48_000), &t);
        assert!((c.ratio - 1.0 / 48_000.0).abs() < 1e-12);
        assert!(c.pass);
    }

    #[test]
    fn format_mismatch_severity_depends_on_mode() {
        let buf = AudioBuffer::new([silence(0.2), tone(2.0, 220.0, 0.5)].concat(), 44_100);
        let t = QcThresholds::default();
        assert_eq!(qc_buffer("s", &buf, 14, &AudioSpec::STUDIO, true, &t).verdict, Verdict::Fail);
        let lenient = qc_buffer("s", &buf, 14, &AudioSpec::STUDIO, false, &t);
        assert_eq!(lenient.verdict, Verdict::Warn);
        assert!(!lenient.format_ok);
    }

    #[test]
    fn silent_file_fails() {
        let buf = AudioBuffer::new(silence(1.0), 48_000);
        let r = qc_buffer("z", &buf, 5, &AudioSpec::STUDIO, true, &QcThresholds::default());
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.syllable_rate, None);
    }

    #[test]
    fn summary_examples() {
        let t = QcThresholds::default();
        let s = dataset_rate_summary(&[7.0, 7.0, 7.0].map(report_with_rate), &t).unwrap();
        assert_eq!(s.display, "7.00±0.00");
        let s = dataset_rate_summary(&[6.0, 8.0].map(report_with_rate), &t).unwrap();
        assert_eq!(s.display, "7.00±1.00");
        assert_eq!(s.out_of_band, 0);
        let s = dataset_rate_summary(&[5.0, 9.0].map(report_with_rate), &t).unwrap();
        assert_eq!(s.out_of_band, 2);
        assert!(matches!(dataset_rate_summary(&[], &t), Err(QcError::EmptyInput)));
    }

    #[test]
    fn threshold_validation() {
        assert!(QcThresholds::default().validate().is_ok());
        let bad = QcThresholds {
            rate_band: [8.0, 6.0],
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = QcThresholds {
            clip_level: f64::NAN,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
