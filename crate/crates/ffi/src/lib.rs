//! C ABI for tts-datakit.
//!
//! Every fallible call returns a [`TtscStatus`]; on failure the message is
//! available from [`ttsc_last_error_message`] on the same thread. Strings
//! returned through `out` parameters are owned by the caller and must be
//! released with [`ttsc_string_free`]. Handles are released with their
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use tts_datakit::audio::{qc_file, read_wav, QcThresholds};
use tts_datakit::metrics::{mcd_audio, CepstrumConfig};
use tts_datakit::script::{analyze_sentence, LanguageConfig, Mode};
use tts_datakit::stats::CorpusStats;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TtscStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// The language config could not be read or is invalid.
    ConfigError = 3,
    /// The sentence was rejected; the rejection is in the output JSON.
    Rejected = 4,
    /// A WAV file could not be read or decoded.
    AudioError = 5,
    /// The signal could not be measured (too short, silent, ...).
    MetricError = 6,
    DuplicateId = 7,
    Panic = 8,
}

/// Loaded language definition.
pub struct TtscLanguage(LanguageConfig);

/// Accumulating syllable and phone counts.
pub struct TtscStats(CorpusStats);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
    Ok(s) => s,
    Err(_) => panic!("version string"),
};

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: TtscStatus, msg: impl Into<String>) -> TtscStatus {
    set_error(msg);
    status
}

fn guard<F: FnOnce() -> TtscStatus>(f: F) -> TtscStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(TtscStatus::Panic, "internal panic"))
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, TtscStatus> {
    if p.is_null() {
        return Err(fail(TtscStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(TtscStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

/// # Safety
/// `out` is null or valid for a pointer write.
unsafe fn put_string(out: *mut *mut c_char, s: String) -> TtscStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            TtscStatus::Ok
        }
        Err(_) => fail(TtscStatus::InvalidUtf8, "output contains NUL"),
    }
}

macro_rules! arg {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

macro_rules! nonnull {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(TtscStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn ttsc_version() -> *const c_char {
    VERSION.as_ptr()
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library on this thread.
#[no_mangle]
pub extern "C" fn ttsc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a language definition file.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn ttsc_language_load(path: *const c_char, out: *mut *mut TtscLanguage) -> TtscStatus {
    guard(|| {
        nonnull!(out);
        let path = arg!(str_arg(path, "path"));
        match LanguageConfig::load(path) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(TtscLanguage(cfg)));
                TtscStatus::Ok
            }
            Err(e) => fail(TtscStatus::ConfigError, e.to_string()),
        }
    })
}

/// Parses a language definition from TOML text.
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn ttsc_language_from_toml(text: *const c_char, out: *mut *mut TtscLanguage) -> TtscStatus {
    guard(|| {
        nonnull!(out);
        let text = arg!(str_arg(text, "text"));
        match LanguageConfig::from_toml_str(text) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(TtscLanguage(cfg)));
                TtscStatus::Ok
            }
            Err(e) => fail(TtscStatus::ConfigError, e.to_string()),
        }
    })
}

/// # Safety
/// `lang` is null or a handle from `ttsc_language_load` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ttsc_language_free(lang: *mut TtscLanguage) {
    if !lang.is_null() {
        drop(Box::from_raw(lang));
    }
}

fn mode(strict: bool) -> Mode {
    if strict {
        Mode::Strict
    } else {
        Mode::Lenient
    }
}

/// Analyzes one sentence. On success `out_json` receives the sentence
/// record; on `TTSC_STATUS_REJECTED` it receives the rejection.
///
/// # Safety
/// `lang` is a live handle; `id` and `text` are NUL-terminated strings;
/// `out_json` is valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn ttsc_analyze_sentence(
    lang: *const TtscLanguage,
    id: *const c_char,
    text: *const c_char,
    strict: bool,
    out_json: *mut *mut c_char,
) -> TtscStatus {
    guard(|| {
        nonnull!(lang, out_json);
        let id = arg!(str_arg(id, "id"));
        let text = arg!(str_arg(text, "text"));
        match analyze_sentence(id, text, &(*lang).0, mode(strict)) {
            Ok(rec) => put_string(out_json, serde_json::to_string(&rec).expect("record serializes")),
            Err(rej) => {
                set_error(rej.reason.to_string());
                put_string(out_json, serde_json::to_string(&rej).expect("rejection serializes"));
                TtscStatus::Rejected
            }
        }
    })
}

/// Number of aksharas in `text` (strict analysis).
///
/// # Safety
/// `lang` is a live handle; `text` is a NUL-terminated string; `out` is
/// valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ttsc_syllable_count(
    lang: *const TtscLanguage,
    text: *const c_char,
    out: *mut usize,
) -> TtscStatus {
    guard(|| {
        nonnull!(lang, out);
        let text = arg!(str_arg(text, "text"));
        match analyze_sentence("", text, &(*lang).0, Mode::Strict) {
            Ok(rec) => {
                *out = rec.syllable_count;
                TtscStatus::Ok
            }
            Err(rej) => fail(TtscStatus::Rejected, rej.reason.to_string()),
        }
    })
}

/// Mel-cepstral distortion in dB between two WAV files, with default
/// analysis settings.
///
/// # Safety
/// Paths are NUL-terminated strings; `out_db` is valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ttsc_mcd_wav(
    reference_path: *const c_char,
    synthesized_path: *const c_char,
    out_db: *mut f64,
) -> TtscStatus {
    guard(|| {
        nonnull!(out_db);
        let r = arg!(str_arg(reference_path, "reference_path"));
        let s = arg!(str_arg(synthesized_path, "synthesized_path"));
        let load = |p: &str| read_wav(p).map_err(|e| fail(TtscStatus::AudioError, format!("{p}: {e}")));
        let (a, b) = (arg!(load(r)), arg!(load(s)));
        match mcd_audio(&a, &b, &CepstrumConfig::default()) {
            Ok(v) => {
                *out_db = v;
                TtscStatus::Ok
            }
            Err(e) => fail(TtscStatus::MetricError, e.to_string()),
        }
    })
}

/// Quality-checks one recording against its transcript with default
/// thresholds; `out_json` receives the report. Problems with the file are
/// reported inside the JSON, not as a failing status.
///
/// # Safety
/// `lang` is a live handle; strings are NUL-terminated; `out_json` is valid
/// for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn ttsc_qc_wav(
    lang: *const TtscLanguage,
    utt_id: *const c_char,
    wav_path: *const c_char,
    transcript: *const c_char,
    strict: bool,
    out_json: *mut *mut c_char,
) -> TtscStatus {
    guard(|| {
        nonnull!(lang, out_json);
        let id = arg!(str_arg(utt_id, "utt_id"));
        let path = arg!(str_arg(wav_path, "wav_path"));
        let text = arg!(str_arg(transcript, "transcript"));
        let report = qc_file(id, Path::new(path), text, &(*lang).0, mode(strict), &QcThresholds::default());
        put_string(out_json, serde_json::to_string(&report).expect("report serializes"))
    })
}

#[no_mangle]
pub extern "C" fn ttsc_stats_new() -> *mut TtscStats {
    Box::into_raw(Box::new(TtscStats(CorpusStats::new())))
}

/// Analyzes `text` (strict) and adds it to the counts.
///
/// # Safety
/// `stats` and `lang` are live handles; `id` and `text` are NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ttsc_stats_add_sentence(
    stats: *mut TtscStats,
    lang: *const TtscLanguage,
    id: *const c_char,
    text: *const c_char,
) -> TtscStatus {
    guard(|| {
        nonnull!(stats, lang);
        let id = arg!(str_arg(id, "id"));
        let text = arg!(str_arg(text, "text"));
        let rec = match analyze_sentence(id, text, &(*lang).0, Mode::Strict) {
            Ok(r) => r,
            Err(rej) => return fail(TtscStatus::Rejected, rej.reason.to_string()),
        };
        match (*stats).0.accumulate(&rec) {
            Ok(()) => TtscStatus::Ok,
            Err(e) => fail(TtscStatus::DuplicateId, e.to_string()),
        }
    })
}

/// The `k` weakest phones as a JSON array of `{phone, count, sentences}`.
///
/// # Safety
/// `stats` is a live handle; `out_json` is valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn ttsc_stats_weak_phones_json(
    stats: *const TtscStats,
    k: usize,
    out_json: *mut *mut c_char,
) -> TtscStatus {
    guard(|| {
        nonnull!(stats, out_json);
        let rows = (*stats).0.weak_phones(k);
        put_string(out_json, serde_json::to_string(&rows).expect("rows serialize"))
    })
}

/// # Safety
/// `stats` is null or a handle from `ttsc_stats_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ttsc_stats_free(stats: *mut TtscStats) {
    if !stats.is_null() {
        drop(Box::from_raw(stats));
    }
}

/// # Safety
/// `s` is null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ttsc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
