//! Recorded-audio checks: WAV format contract, endpointing, syllable rate
//! and clipping.

mod endpoint;
mod qc;
mod wav;

pub use endpoint::{endpoint, frame_geometry, trim, Endpoints, Pause, FRAME_MS, HOP_MS};
pub use qc::{
    clip_check, dataset_rate_summary, decide, qc_buffer, qc_file, reasons_for, syllable_rate,
    ClipCheck, QcError, QcReason, QcReport, QcThresholds, RateCheck, RateSummary, Verdict,
};
pub use wav::{
    read_wav, read_wav_file, write_wav, AudioBuffer, AudioSpec, Chunk, SampleKind, WavError,
    WavFile, WavFormat,
};

#[cfg(test)]
pub(crate) mod testing {
    pub const RATE: f64 = 48_000.0;

    pub fn silence(seconds: f64) -> Vec<f32> {
        vec![0.0; (seconds * RATE).round() as usize]
    }

    /// Cosine tone, so the first sample sits at full amplitude.
    pub fn tone(seconds: f64, freq: f64, amp: f64) -> Vec<f32> {
        let n = (seconds * RATE).round() as usize;
        (0..n)
            .map(|i| (amp * (2.0 * std::f64::consts::PI * freq * i as f64 / RATE).cos()) as f32)
            .collect()
    }
}
