//! Oracles and generators shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tts_datakit::script::{LanguageConfig, SentenceRecord};

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn toy_dir() -> PathBuf {
    manifest_dir().join("tests/fixtures/toy")
}

pub fn hindi() -> LanguageConfig {
    LanguageConfig::load(manifest_dir().join("configs/hindi.toml")).unwrap()
}

pub fn script_config(script: &str) -> LanguageConfig {
    if script == "hindi" {
        return hindi();
    }
    LanguageConfig::load(manifest_dir().join(format!("tests/fixtures/scripts/{script}.toml"))).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A record with one word per syllable and the given phones.
pub fn record(id: &str, syllables: &[String], phones: &[String]) -> SentenceRecord {
    SentenceRecord {
        id: id.to_string(),
        raw_text: syllables.concat(),
        words: syllables.to_vec(),
        syllables_per_word: syllables.iter().map(|s| vec![s.clone()]).collect(),
        phones: phones.to_vec(),
        word_count: syllables.len(),
        syllable_count: syllables.len(),
        needs_normalization: false,
        warnings: Vec::new(),
    }
}

/// Random pool of `n` sentences drawing syllables from `universe` labels.
pub fn random_syllable_pool(rng: &mut impl Rng, n: usize, universe: usize) -> Vec<SentenceRecord> {
    (0..n)
        .map(|i| {
            let len = rng.gen_range(1..=5);
            let sylls: Vec<String> = (0..len).map(|_| format!("y{}", rng.gen_range(0..universe))).collect();
            record(&format!("p{i:02}"), &sylls, &["a".to_string()])
        })
        .collect()
}

/// Random pool where phone `f{j}` appears with a per-phone probability, so
/// some phones are rare and some are plentiful.
pub fn random_phone_pool(rng: &mut impl Rng, n: usize, phones: usize) -> Vec<SentenceRecord> {
    let rates: Vec<f64> = (0..phones).map(|_| rng.gen_range(0.02..0.6)).collect();
    (0..n)
        .map(|i| {
            let mut ph: Vec<String> = rates
                .iter()
                .enumerate()
                .filter(|(_, &p)| rng.gen_bool(p))
                .map(|(j, _)| format!("f{j:02}"))
                .collect();
            ph.push("a".to_string());
            ph.shuffle(rng);
            let sylls: Vec<String> = (0..rng.gen_range(1..=4))
                .map(|_| format!("y{}", rng.gen_range(0..40)))
                .collect();
            record(&format!("q{i:03}"), &sylls, &ph)
        })
        .collect()
}

/// Largest number of distinct syllables any subset of at most `k` sentences
/// covers, by enumerating every subset.
pub fn brute_force_coverage(pool: &[SentenceRecord], k: usize) -> usize {
    let sets: Vec<BTreeSet<&str>> = pool.iter().map(|r| r.syllable_set()).collect();
    let mut best = 0;
    for mask in 0u32..(1 << pool.len()) {
        if mask.count_ones() as usize > k {
            continue;
        }
        let mut union = BTreeSet::new();
        for (i, s) in sets.iter().enumerate() {
            if mask & (1 << i) != 0 {
                union.extend(s.iter().copied());
            }
        }
        best = best.max(union.len());
    }
    best
}

/// Minimum summed cost over every monotone path from (0,0) to (n-1,m-1)
/// with steps (1,0), (0,1), (1,1), summing along the path from the start.
pub fn exhaustive_path_cost(cost: &[Vec<f64>]) -> f64 {
    fn walk(cost: &[Vec<f64>], i: usize, j: usize, acc: f64, best: &mut f64) {
        let acc = acc + cost[i][j];
        let (n, m) = (cost.len(), cost[0].len());
        if i == n - 1 && j == m - 1 {
            *best = best.min(acc);
            return;
        }
        if i + 1 < n {
            walk(cost, i + 1, j, acc, best);
        }
        if j + 1 < m {
            walk(cost, i, j + 1, acc, best);
        }
        if i + 1 < n && j + 1 < m {
            walk(cost, i + 1, j + 1, acc, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(cost, 0, 0, 0.0, &mut best);
    best
}

/// Cosine tone at `rate` Hz.
pub fn tone(rate: u32, seconds: f64, freq: f64, amp: f64) -> Vec<f32> {
    let n = (seconds * rate as f64).round() as usize;
    (0..n)
        .map(|i| (amp * (2.0 * std::f64::consts::PI * freq * i as f64 / rate as f64).cos()) as f32)
        .collect()
}

pub fn silence(rate: u32, seconds: f64) -> Vec<f32> {
    vec![0.0; (seconds * rate as f64).round() as usize]
}

/// Every file in `dir` except the run ledger, as (name, bytes), sorted.
pub fn output_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "run_ledger.json")
        .map(|e| (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap()))
        .collect();
    out.sort();
    out
}

pub fn cli() -> std::process::Command {
    let mut c = std::process::Command::new(env!("CARGO_BIN_EXE_tts-datakit"));
    for (k, _) in std::env::vars() {
        if k.starts_with("TTSDK_") {
            c.env_remove(k);
        }
    }
    c
}

/// Runs the full toy pipeline plus the metric commands into `out`.
pub fn run_toy(out: &Path, jobs: usize) {
    let toy = toy_dir();
    let cfg = toy.join("pipeline.toml");
    let steps: [Vec<PathBuf>; 4] = [
        vec!["run".into(), toy.join("raw.txt"), "--manifest".into(), toy.join("manifest.tsv")],
        vec!["mcd".into(), toy.join("pairs.tsv")],
        vec!["mos".into(), toy.join("ratings.csv")],
        vec!["dmos".into(), toy.join("ratings.csv")],
    ];
    for args in steps {
        let status = cli()
            .arg("--config")
            .arg(&cfg)
            .arg("--out-dir")
            .arg(out)
            .arg("--jobs")
            .arg(jobs.to_string())
            .args(&args)
            .output()
            .unwrap();
        assert!(status.status.success(), "{args:?}: {}", String::from_utf8_lossy(&status.stderr));
    }
}
