use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use tts_datakit_ffi::*;

fn core_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core")
}

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn path_c(p: &Path) -> CString {
    c(p.to_str().unwrap())
}

fn hindi() -> *mut TtscLanguage {
    let mut lang = ptr::null_mut();
    let path = path_c(&core_dir().join("configs/hindi.toml"));
    assert_eq!(unsafe { ttsc_language_load(path.as_ptr(), &mut lang) }, TtscStatus::Ok);
    lang
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    ttsc_string_free(s);
    out
}

fn last_error() -> String {
    let p = ttsc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(ttsc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn analyze_and_count() {
    let lang = hindi();
    let mut n = 0usize;
    let text = c("भारत देश");
    assert_eq!(unsafe { ttsc_syllable_count(lang, text.as_ptr(), &mut n) }, TtscStatus::Ok);
    assert_eq!(n, 5);
    assert!(ttsc_last_error_message().is_null());

    let mut json = ptr::null_mut();
    let st = unsafe { ttsc_analyze_sentence(lang, c("s1").as_ptr(), c("भारत").as_ptr(), true, &mut json) };
    assert_eq!(st, TtscStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&unsafe { take(json) }).unwrap();
    assert_eq!(v["phones"], serde_json::json!(["bh", "aa", "r", "a", "t", "a"]));

    let st = unsafe { ttsc_analyze_sentence(lang, c("s3").as_ptr(), c("भारत xyz").as_ptr(), true, &mut json) };
    assert_eq!(st, TtscStatus::Rejected);
    let v: serde_json::Value = serde_json::from_str(&unsafe { take(json) }).unwrap();
    assert_eq!(v["codepoint"], "U+0078");
    assert!(last_error().contains("U+0078"));
    unsafe { ttsc_language_free(lang) };
}

#[test]
fn null_and_bad_input() {
    let mut n = 0usize;
    let st = unsafe { ttsc_syllable_count(ptr::null(), c("x").as_ptr(), &mut n) };
    assert_eq!(st, TtscStatus::NullPointer);
    assert!(last_error().contains("lang"));

    let lang = hindi();
    let bad = [0xffu8, 0xfe, 0];
    let st = unsafe { ttsc_syllable_count(lang, bad.as_ptr() as *const c_char, &mut n) };
    assert_eq!(st, TtscStatus::InvalidUtf8);

    let mut other = ptr::null_mut();
    let st = unsafe { ttsc_language_from_toml(c("language_id = 3").as_ptr(), &mut other) };
    assert_eq!(st, TtscStatus::ConfigError);
    assert!(other.is_null());
    unsafe {
        ttsc_language_free(lang);
        ttsc_language_free(ptr::null_mut());
        ttsc_string_free(ptr::null_mut());
    }
}

#[test]
fn stats_handle() {
    let lang = hindi();
    let stats = ttsc_stats_new();
    for (id, text) in [("a", "भारत देश"), ("b", "देश")] {
        let st = unsafe { ttsc_stats_add_sentence(stats, lang, c(id).as_ptr(), c(text).as_ptr()) };
        assert_eq!(st, TtscStatus::Ok);
    }
    let st = unsafe { ttsc_stats_add_sentence(stats, lang, c("a").as_ptr(), c("देश").as_ptr()) };
    assert_eq!(st, TtscStatus::DuplicateId);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { ttsc_stats_weak_phones_json(stats, 2, &mut json) }, TtscStatus::Ok);
    let rows: serde_json::Value = serde_json::from_str(&unsafe { take(json) }).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
    assert_eq!(rows[0]["phone"], "aa");
    assert_eq!(rows[1]["phone"], "bh");
    assert_eq!(rows[0]["count"], 1);
    unsafe {
        ttsc_stats_free(stats);
        ttsc_language_free(lang);
    }
}

#[test]
fn audio_calls() {
    let wav = core_dir().join("tests/fixtures/toy/wav");
    let u1 = path_c(&wav.join("u1.wav"));
    let mut db = -1.0;
    assert_eq!(unsafe { ttsc_mcd_wav(u1.as_ptr(), u1.as_ptr(), &mut db) }, TtscStatus::Ok);
    assert_eq!(db, 0.0);

    let missing = path_c(&wav.join("nope.wav"));
    assert_eq!(unsafe { ttsc_mcd_wav(u1.as_ptr(), missing.as_ptr(), &mut db) }, TtscStatus::AudioError);
    assert!(last_error().contains("nope.wav"));

    let lang = hindi();
    let mut json = ptr::null_mut();
    let u4 = path_c(&wav.join("u4.wav"));
    let text = c("भारत सुंदर देश है और घर है");
    let st = unsafe { ttsc_qc_wav(lang, c("u4").as_ptr(), u4.as_ptr(), text.as_ptr(), true, &mut json) };
    assert_eq!(st, TtscStatus::Ok);
    let report: serde_json::Value = serde_json::from_str(&unsafe { take(json) }).unwrap();
    assert_eq!(report["verdict"], "fail");
    assert_eq!(report["syllable_count"], 14);
    unsafe { ttsc_language_free(lang) };
}

#[test]
fn header_is_current() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/tts_datakit.h")).unwrap();
    for name in [
        "ttsc_version",
        "ttsc_last_error_message",
        "ttsc_language_load",
        "ttsc_language_from_toml",
        "ttsc_language_free",
        "ttsc_analyze_sentence",
        "ttsc_syllable_count",
        "ttsc_mcd_wav",
        "ttsc_qc_wav",
        "ttsc_stats_new",
        "ttsc_stats_add_sentence",
        "ttsc_stats_weak_phones_json",
        "ttsc_stats_free",
        "ttsc_string_free",
        "typedef struct TtscLanguage TtscLanguage;",
        "TTSC_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

/// Compiles and runs a C program against the header and static library when
/// a C compiler and the built archive are available.
#[test]
fn c_program_links() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let target = std::env::var_os("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| manifest.join("../../target"));
    let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
    let archive = target.join(profile).join("libtts_datakit_ffi.a");
    if !archive.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or no static library");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).arg(core_dir().join("configs/hindi.toml")).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), format!("{} 5", env!("CARGO_PKG_VERSION")));
}
