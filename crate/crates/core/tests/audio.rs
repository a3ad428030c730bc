mod common;

use common::{hindi, silence, tone, toy_dir};
use tts_datakit::audio::{
    endpoint, qc_buffer, qc_file, read_wav_file, AudioBuffer, AudioSpec, QcReason, QcThresholds, Verdict, WavError,
    WavFile,
};
use tts_datakit::script::Mode;

#[test]
fn fixture_wavs_round_trip() {
    for name in ["u1", "u2", "u3", "u4", "u5", "syn1", "syn2"] {
        let bytes = std::fs::read(toy_dir().join(format!("wav/{name}.wav"))).unwrap();
        let wav = WavFile::from_bytes(&bytes).unwrap();
        assert_eq!(wav.to_bytes(), bytes, "{name}");
    }
}

#[test]
fn extra_chunks_survive() {
    let buf = AudioBuffer::new(tone(48_000, 0.05, 440.0, 0.3), 48_000);
    let mut bytes = buf.to_wav_16bit().to_bytes();
    let list = b"LIST\x05\x00\x00\x00INFOx\x00";
    bytes.extend_from_slice(list);
    let riff_len = (bytes.len() - 8) as u32;
    bytes[4..8].copy_from_slice(&riff_len.to_le_bytes());
    let wav = WavFile::from_bytes(&bytes).unwrap();
    assert_eq!(wav.to_bytes(), bytes);
    assert_eq!(wav.to_buffer().samples.len(), buf.samples.len());
}

#[test]
fn malformed_files() {
    assert!(matches!(WavFile::from_bytes(b"RIFX0000WAVE"), Err(WavError::NotRiff)));
    let bytes = AudioBuffer::new(vec![0.1; 100], 48_000).to_wav_16bit().to_bytes();
    assert!(matches!(WavFile::from_bytes(&bytes[..bytes.len() - 10]), Err(WavError::TruncatedData { .. })));
    assert!(matches!(read_wav_file(toy_dir().join("missing.wav")), Err(WavError::Io(_))));
}

#[test]
fn manifest_fixtures_have_expected_verdicts() {
    let lang = hindi();
    let t = QcThresholds::default();
    let manifest = std::fs::read_to_string(toy_dir().join("manifest.tsv")).unwrap();
    let verdicts: Vec<Verdict> = manifest
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            qc_file(f[0], &toy_dir().join(f[1]), f[2], &lang, Mode::Strict, &t).verdict
        })
        .collect();
    assert_eq!(verdicts, [Verdict::Pass, Verdict::Pass, Verdict::Warn, Verdict::Fail, Verdict::Fail]);
    let u4 = qc_file("u4", &toy_dir().join("wav/u4.wav"), "भारत", &lang, Mode::Lenient, &t);
    assert!(matches!(u4.reasons[0], QcReason::FormatMismatch { .. }));
}

#[test]
fn pauses_reduce_net_duration() {
    let r = 48_000;
    let samples = [silence(r, 0.3), tone(r, 0.8, 200.0, 0.4), silence(r, 0.5), tone(r, 0.7, 200.0, 0.4), silence(r, 0.1)].concat();
    let ep = endpoint(&AudioBuffer::new(samples, r), &QcThresholds::default()).unwrap();
    assert_eq!(ep.pauses.len(), 1);
    assert!((ep.net_speech_duration - 1.5).abs() < 0.01);
    assert!((ep.leading_trim - 0.3).abs() < 0.01);
    assert!((ep.trailing_trim - 0.1).abs() < 0.01);
}

#[test]
fn unreadable_and_rejected_inputs_fail() {
    let lang = hindi();
    let t = QcThresholds::default();
    let r = qc_file("x", &toy_dir().join("wav/none.wav"), "भारत", &lang, Mode::Strict, &t);
    assert_eq!(r.verdict, Verdict::Fail);
    let r = qc_file("y", &toy_dir().join("wav/u1.wav"), "abc", &lang, Mode::Strict, &t);
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(r.reasons.iter().any(|x| matches!(x, QcReason::TranscriptRejected { .. })));
}

#[test]
fn stereo_source_keeps_channel_count() {
    let buf = AudioBuffer::new(tone(48_000, 1.0, 300.0, 0.5), 48_000);
    let mut spec = buf.spec;
    spec.channels = 2;
    let stereo = AudioBuffer { samples: buf.samples, spec };
    let r = qc_buffer("s", &stereo, 7, &AudioSpec::STUDIO, true, &QcThresholds::default());
    assert_eq!(r.verdict, Verdict::Fail);
}
