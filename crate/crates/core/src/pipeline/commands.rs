use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::ledger::{InputDigest, RunLedger};
use super::{PipelineConfig, PipelineError};
use crate::audio::{dataset_rate_summary, qc_file, QcError, QcReport, RateSummary, Verdict};
use crate::curation::{Curator, Lexicon, WordFrequency};
use crate::metrics::{
    dmos_aggregate, mcd_audio, mcd_report, mos_aggregate, read_ratings, render_table, systems,
    Condition, MetricReport, MetricsError, Rating,
};
use crate::script::{analyze_sentence, LanguageConfig, Rejection, SentenceRecord};
use crate::select::{
    augment_weak, filter, greedy_select_against, recompute_coverage, FilterRejection, SelectionResult, StopCriterion,
};
use crate::stats::{write_weak_phone_csv, CorpusStats, WeakPhone, ZipfFit};

/// Shared settings for one invocation.
#[derive(Debug, Clone)]
pub struct Context {
    pub cfg: PipelineConfig,
    pub out_dir: PathBuf,
    /// Re-run stages even when the ledger says they are up to date.
    pub force: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageOutcome {
    pub stage: &'static str,
    pub skipped: bool,
    /// One-line human summary, or a rendered table for metric stages.
    pub summary: String,
    /// Items that failed a check without aborting the stage.
    pub failures: usize,
}

struct Produced {
    files: Vec<(&'static str, Vec<u8>)>,
    summary: String,
    failures: usize,
}

impl Context {
    fn stage<F>(&self, stage: &'static str, digest: InputDigest, body: F) -> Result<StageOutcome, PipelineError>
    where
        F: FnOnce() -> Result<Produced, PipelineError>,
    {
        let digest = digest.finish();
        let mut ledger = RunLedger::load(&self.out_dir);
        if !self.force && ledger.is_fresh(stage, &digest, &self.out_dir) {
            return Ok(StageOutcome {
                stage,
                skipped: true,
                summary: "up to date".to_string(),
                failures: 0,
            });
        }
        let started = Instant::now();
        let produced = body()?;
        std::fs::create_dir_all(&self.out_dir)?;
        for (name, bytes) in &produced.files {
            std::fs::write(self.out_dir.join(name), bytes)?;
        }
        let names: Vec<&str> = produced.files.iter().map(|(n, _)| *n).collect();
        ledger.record(stage, digest, &self.out_dir, &names, started.elapsed())?;
        ledger.save(&self.out_dir)?;
        Ok(StageOutcome {
            stage,
            skipped: false,
            summary: produced.summary,
            failures: produced.failures,
        })
    }

    fn language(&self, digest: &mut InputDigest) -> Result<LanguageConfig, PipelineError> {
        let lang = self.cfg.load_language()?;
        let path = self.cfg.language.as_ref().expect("loaded above");
        digest.bytes("language", &read_input(path)?);
        Ok(lang)
    }

    fn optional_language(&self, digest: &mut InputDigest) -> Result<Option<LanguageConfig>, PipelineError> {
        match self.cfg.language {
            Some(_) => self.language(digest).map(Some),
            None => Ok(None),
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, PipelineError> {
    std::fs::read(path).map_err(|source| PipelineError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn read_text(path: &Path) -> Result<String, PipelineError> {
    String::from_utf8(read_input(path)?).map_err(|e| PipelineError::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: format!("not UTF-8: {e}"),
    })
}

fn add_config<T: Serialize + ?Sized>(d: &mut InputDigest, value: &T) {
    d.text("config", &serde_json::to_string(value).expect("config serializes"));
}

fn pretty<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s.into_bytes()
}

fn jsonl<T: Serialize>(items: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, item).expect("record serializes");
        out.push(b'\n');
    }
    out
}

fn csv_bytes<F>(write: F) -> Vec<u8>
where
    F: FnOnce(&mut Vec<u8>) -> csv::Result<()>,
{
    let mut out = Vec::new();
    write(&mut out).expect("writing to memory");
    out
}

fn tsv_field(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

/// Nonblank lines as `(id, text)`. A line `id<TAB>text` keeps its id;
/// otherwise the id is `s` plus the zero-padded line number.
pub fn parse_text_lines(text: &str) -> Vec<(String, String)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| match line.split_once('\t') {
            Some((id, t)) => (id.trim().to_string(), t.to_string()),
            None => (format!("s{:05}", i + 1), line.to_string()),
        })
        .collect()
}

fn check_unique_ids<'a>(ids: impl IntoIterator<Item = &'a str>) -> Result<(), PipelineError> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(PipelineError::DuplicateId(id.to_string()));
        }
    }
    Ok(())
}

fn read_records(path: &Path, text: &str) -> Result<Vec<SentenceRecord>, PipelineError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| PipelineError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn cmd_analyze(ctx: &Context, input: &Path) -> Result<StageOutcome, PipelineError> {
    let mut d = InputDigest::new("analyze");
    let lang = ctx.language(&mut d)?;
    let mode = ctx.cfg.mode();
    let text = read_text(input)?;
    d.text("mode", &format!("{mode:?}")).text("input", &text);
    ctx.stage("analyze", d, || {
        let lines = parse_text_lines(&text);
        check_unique_ids(lines.iter().map(|(id, _)| id.as_str()))?;
        let results: Vec<Result<SentenceRecord, Rejection>> = lines
            .par_iter()
            .map(|(id, t)| analyze_sentence(id, t, &lang, mode))
            .collect();
        let mut records = Vec::new();
        let mut rejects = Vec::new();
        for r in results {
            match r {
                Ok(rec) => records.push(rec),
                Err(rej) => rejects.push(rej),
            }
        }
        Ok(Produced {
            summary: format!("{} analyzed, {} rejected", records.len(), rejects.len()),
            files: vec![("analyzed.jsonl", jsonl(&records)), ("rejects.jsonl", jsonl(&rejects))],
            failures: 0,
        })
    })
}

#[derive(Serialize)]
struct StatsReport {
    sentences: usize,
    total_syllables: u64,
    unique_syllables: usize,
    unique_phones: usize,
    syllable_zipf: Option<ZipfFit>,
    syllable_zipf_error: Option<String>,
    weak_phones: Vec<WeakPhone>,
}

pub fn cmd_stats(ctx: &Context, analyzed: &Path) -> Result<StageOutcome, PipelineError> {
    let mut d = InputDigest::new("stats");
    let lang = ctx.optional_language(&mut d)?;
    let text = read_text(analyzed)?;
    add_config(&mut d, &(&ctx.cfg.stats, ctx.cfg.augmentation.weak_k));
    d.text("input", &text);
    ctx.stage("stats", d, || {
        let records = read_records(analyzed, &text)?;
        let stats = records
            .par_iter()
            .try_fold(CorpusStats::new, |mut s, r| s.accumulate(r).map(|_| s))
            .try_reduce(CorpusStats::new, |a, b| a.merge(&b))?;
        let universe: Vec<&str> = lang.as_ref().map(|l| l.inventory().collect()).unwrap_or_default();
        let weak = stats.weak_phones_among(ctx.cfg.augmentation.weak_k, universe);
        let zipf = stats.zipf_fit(ctx.cfg.stats.zipf_min_count);
        let report = StatsReport {
            sentences: stats.sentence_count,
            total_syllables: stats.total_syllables(),
            unique_syllables: stats.syllable_freq.len(),
            unique_phones: stats.phone_freq.len(),
            syllable_zipf_error: zipf.as_ref().err().map(ToString::to_string),
            syllable_zipf: zipf.ok(),
            weak_phones: weak.clone(),
        };
        let summary = match report.syllable_zipf {
            Some(z) => format!(
                "{} sentences, {} unique syllables, zipf s={:.3} r2={:.3}",
                report.sentences, report.unique_syllables, z.exponent, z.r_squared
            ),
            None => format!("{} sentences, {} unique syllables", report.sentences, report.unique_syllables),
        };
        Ok(Produced {
            files: vec![
                ("syllables.csv", csv_bytes(|w| stats.write_syllable_csv(w))),
                ("phones.csv", csv_bytes(|w| stats.write_phone_csv(w))),
                ("weak_phones.csv", csv_bytes(|w| write_weak_phone_csv(w, &weak))),
                ("stats_report.json", pretty(&report)),
            ],
            summary,
            failures: 0,
        })
    })
}

#[derive(Serialize)]
struct SelectionReport {
    pool_size: usize,
    accepted: usize,
    stop: StopCriterion,
    #[serde(flatten)]
    result: SelectionResult,
    filtered: Vec<FilterRejection>,
    weak_phones_before: Vec<WeakPhone>,
    weak_phones_after: Vec<WeakPhone>,
}

pub fn cmd_select(ctx: &Context, analyzed: &Path) -> Result<StageOutcome, PipelineError> {
    let mut d = InputDigest::new("select");
    let text = read_text(analyzed)?;
    let cfg = &ctx.cfg;
    add_config(&mut d, &(&cfg.constraints, &cfg.selection, &cfg.augmentation));
    d.text("input", &text);
    ctx.stage("select", d, || {
        let records = read_records(analyzed, &text)?;
        let (accepted, filtered) = filter(&records, &cfg.constraints);
        let stop = cfg.selection.stop();
        let inventory: BTreeSet<&str> = records.iter().flat_map(SentenceRecord::syllable_set).collect();
        let greedy = greedy_select_against(&accepted, &inventory, stop)?;
        let by_id: HashMap<&str, &SentenceRecord> = accepted.iter().map(|r| (r.id.as_str(), r)).collect();
        let stats_of = |ids: &[String]| CorpusStats::from_records(ids.iter().map(|id| by_id[id.as_str()]));

        let before_stats = stats_of(&greedy.selected_ids)?;
        let pool_phones: BTreeSet<&str> = accepted
            .iter()
            .flat_map(|r| r.phones.iter().map(String::as_str))
            .collect();
        let before = before_stats.weak_phones_among(cfg.augmentation.weak_k, pool_phones);
        let mut result = augment_weak(&greedy, &accepted, &before_stats, &cfg.augmentation);
        recompute_coverage(&mut result, &inventory);
        let after_stats = stats_of(&result.selected_ids)?;
        let after: Vec<WeakPhone> = before
            .iter()
            .map(|w| WeakPhone {
                phone: w.phone.clone(),
                count: after_stats.phone_freq.get(&w.phone).copied().unwrap_or(0),
                sentences: after_stats.sentences_with(&w.phone),
            })
            .collect();

        let mut script = String::new();
        for id in &result.selected_ids {
            script.push_str(&format!("{id}\t{}\n", tsv_field(&by_id[id.as_str()].raw_text)));
        }
        let summary = format!(
            "{} of {} accepted sentences selected ({} by augmentation), coverage {:.4}, {} warnings",
            result.selected_ids.len(),
            accepted.len(),
            result.selected_ids.len() - greedy.selected_ids.len(),
            result.coverage_ratio,
            result.warnings.len()
        );
        let report = SelectionReport {
            pool_size: records.len(),
            accepted: accepted.len(),
            stop,
            result,
            filtered,
            weak_phones_before: before.clone(),
            weak_phones_after: after.clone(),
        };
        Ok(Produced {
            files: vec![
                ("script.tsv", script.into_bytes()),
                ("selection_report.json", pretty(&report)),
                ("weak_phones_before.csv", csv_bytes(|w| write_weak_phone_csv(w, &before))),
                ("weak_phones_after.csv", csv_bytes(|w| write_weak_phone_csv(w, &after))),
            ],
            summary,
            failures: 0,
        })
    })
}

pub fn cmd_curate(ctx: &Context, input: &Path) -> Result<StageOutcome, PipelineError> {
    let mut d = InputDigest::new("curate");
    let settings = &ctx.cfg.curation;
    let lang = ctx.optional_language(&mut d)?;
    add_config(&mut d, settings);
    let lexicon = match &settings.lexicon {
        Some(p) => {
            let bytes = read_input(p)?;
            d.bytes("lexicon", &bytes);
            Lexicon::from_reader(bytes.as_slice()).map_err(|source| PipelineError::Input {
                path: p.clone(),
                source,
            })?
        }
        None => Lexicon::new(),
    };
    let keywords = match &settings.keywords {
        Some(p) => {
            d.bytes("keywords", &read_input(p)?);
            Curator::load_keywords(p).map_err(|source| PipelineError::Input {
                path: p.clone(),
                source,
            })?
        }
        None => Vec::new(),
    };
    let text = read_text(input)?;
    d.text("input", &text);
    ctx.stage("curate", d, || {
        let lines = parse_text_lines(&text);
        check_unique_ids(lines.iter().map(|(id, _)| id.as_str()))?;
        let word_frequency = match (&lang, settings.uncommon_min_count) {
            (Some(l), Some(min)) => Some((WordFrequency::from_texts(lines.iter().map(|(_, t)| t.as_str()), l), min)),
            _ => None,
        };
        let curator = Curator {
            lexicon,
            keywords,
            language: lang,
            max_syllables_per_word: settings.max_syllables_per_word,
            word_frequency,
        };
        let verdicts: Vec<_> = lines.par_iter().map(|(id, t)| curator.curate(id, t)).collect();
        let mut clean = String::new();
        let mut review = 0;
        for v in &verdicts {
            if v.needs_human() {
                review += 1;
            } else {
                clean.push_str(&format!("{}\t{}\n", v.sentence_id, tsv_field(&v.normalized_text)));
            }
        }
        Ok(Produced {
            summary: format!(
                "{} sentences, {} clean, {} need review",
                verdicts.len(),
                verdicts.len() - review,
                review
            ),
            files: vec![("curation.jsonl", jsonl(&verdicts)), ("curated.tsv", clean.into_bytes())],
            failures: review,
        })
    })
}

#[derive(Serialize)]
struct QcSummary {
    utterances: usize,
    pass: usize,
    warn: usize,
    fail: usize,
    syllable_rate: Option<RateSummary>,
}

/// Splits a TSV line into at most `max` fields, the last taking the rest.
fn fields<'a>(path: &Path, line_no: usize, line: &'a str, min: usize, max: usize) -> Result<Vec<&'a str>, PipelineError> {
    let f: Vec<&str> = line.splitn(max, '\t').collect();
    if f.len() < min {
        return Err(PipelineError::Parse {
            path: path.to_path_buf(),
            line: line_no,
            message: format!("expected at least {min} tab-separated fields"),
        });
    }
    Ok(f)
}

fn tsv_rows<'a>(path: &Path, text: &'a str, min: usize, max: usize) -> Result<Vec<Vec<&'a str>>, PipelineError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| fields(path, i + 1, l, min, max))
        .collect()
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn cmd_qc(ctx: &Context, manifest: &Path) -> Result<StageOutcome, PipelineError> {
    let mut d = InputDigest::new("qc");
    let lang = ctx.language(&mut d)?;
    let mode = ctx.cfg.mode();
    let text = read_text(manifest)?;
    let rows = tsv_rows(manifest, &text, 3, 3)?;
    let base = base_dir(manifest);
    add_config(&mut d, &ctx.cfg.qc);
    d.text("mode", &format!("{mode:?}")).text("manifest", &text);
    for row in &rows {
        match std::fs::read(base.join(row[1])) {
            Ok(b) => d.bytes(row[1], &b),
            Err(_) => d.text(row[1], "<missing>"),
        };
    }
    ctx.stage("qc", d, || {
        if rows.is_empty() {
            return Err(QcError::EmptyInput.into());
        }
        check_unique_ids(rows.iter().map(|r| r[0]))?;
        let reports: Vec<QcReport> = rows
            .par_iter()
            .map(|r| qc_file(r[0], &base.join(r[1]), r[2], &lang, mode, &ctx.cfg.qc))
            .collect();
        let count = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
        let summary = QcSummary {
            utterances: reports.len(),
            pass: count(Verdict::Pass),
            warn: count(Verdict::Warn),
            fail: count(Verdict::Fail),
            syllable_rate: dataset_rate_summary(&reports, &ctx.cfg.qc).ok(),
        };
        let rate = summary
            .syllable_rate
            .as_ref()
            .map(|r| format!(", syllable rate {}", r.display))
            .unwrap_or_default();
        Ok(Produced {
            summary: format!(
                "{} utterances: {} pass, {} warn, {} fail{rate}",
                summary.utterances, summary.pass, summary.warn, summary.fail
            ),
            failures: summary.fail,
            files: vec![("qc_reports.jsonl", jsonl(&reports)), ("qc_summary.json", pretty(&summary))],
        })
    })
}

#[derive(Serialize)]
struct PairScore<'a> {
    system: &'a str,
    reference: &'a str,
    synthesized: &'a str,
    mcd_db: f64,
}

/// Reads `reference<TAB>synthesized[<TAB>system]` rows; paths are relative
/// to the pairs file.
pub fn cmd_mcd(ctx: &Context, pairs: &Path) -> Result<StageOutcome, PipelineError> {
    let mut d = InputDigest::new("mcd");
    let text = read_text(pairs)?;
    let rows = tsv_rows(pairs, &text, 2, 3)?;
    let base = base_dir(pairs);
    add_config(&mut d, &ctx.cfg.metrics);
    d.text("pairs", &text);
    let mut wavs = BTreeMap::new();
    for p in rows.iter().flat_map(|r| [r[0], r[1]]) {
        if !wavs.contains_key(p) {
            let bytes = read_input(&base.join(p))?;
            d.bytes(p, &bytes);
            wavs.insert(p, bytes);
        }
    }
    ctx.stage("mcd", d, || {
        if rows.is_empty() {
            return Err(MetricsError::EmptyInput.into());
        }
        let load = |p: &str| {
            crate::audio::WavFile::from_bytes(&wavs[p])
                .map(|w| w.to_buffer())
                .map_err(|e| PipelineError::Audio {
                    path: base.join(p),
                    source: MetricsError::Qc(e.into()),
                })
        };
        let scores: Vec<PairScore> = rows
            .par_iter()
            .map(|r| {
                let (a, b) = (load(r[0])?, load(r[1])?);
                let v = mcd_audio(&a, &b, &ctx.cfg.metrics).map_err(|source| PipelineError::Audio {
                    path: base.join(r[1]),
                    source,
                })?;
                Ok(PairScore {
                    system: r.get(2).copied().unwrap_or("default"),
                    reference: r[0],
                    synthesized: r[1],
                    mcd_db: v,
                })
            })
            .collect::<Result<_, PipelineError>>()?;
        let mut by_system: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for s in &scores {
            by_system.entry(s.system).or_default().push(s.mcd_db);
        }
        let reports = by_system
            .iter()
            .map(|(sys, v)| mcd_report(sys, v))
            .collect::<Result<Vec<_>, _>>()?;
        metric_outputs("mcd", reports, Some(("mcd_pairs.jsonl", jsonl(&scores))))
    })
}

fn metric_outputs(
    name: &'static str,
    reports: Vec<MetricReport>,
    extra: Option<(&'static str, Vec<u8>)>,
) -> Result<Produced, PipelineError> {
    let table = render_table(&reports);
    let (report_file, table_file) = match name {
        "mcd" => ("mcd_report.json", "mcd_table.txt"),
        "mos" => ("mos_report.json", "mos_table.txt"),
        _ => ("dmos_report.json", "dmos_table.txt"),
    };
    let mut files: Vec<(&'static str, Vec<u8>)> = extra.into_iter().collect();
    files.push((report_file, pretty(&reports)));
    files.push((table_file, table.clone().into_bytes()));
    Ok(Produced {
        files,
        summary: table.trim_end().to_string(),
        failures: 0,
    })
}

fn ratings_stage<F>(ctx: &Context, stage: &'static str, path: &Path, aggregate: F) -> Result<StageOutcome, PipelineError>
where
    F: FnOnce(&[Rating]) -> Result<Vec<MetricReport>, MetricsError>,
{
    let mut d = InputDigest::new(stage);
    let bytes = read_input(path)?;
    d.bytes("ratings", &bytes);
    ctx.stage(stage, d, || {
        let ratings = read_ratings(bytes.as_slice())?;
        let reports = aggregate(&ratings)?;
        metric_outputs(stage, reports, None)
    })
}

pub fn cmd_mos(ctx: &Context, ratings: &Path) -> Result<StageOutcome, PipelineError> {
    ratings_stage(ctx, "mos", ratings, |r| {
        if r.is_empty() {
            return Err(MetricsError::EmptyInput);
        }
        systems(r).iter().map(|s| mos_aggregate(r, s)).collect()
    })
}

/// DMOS for every system that has synthesized ratings.
pub fn cmd_dmos(ctx: &Context, ratings: &Path) -> Result<StageOutcome, PipelineError> {
    ratings_stage(ctx, "dmos", ratings, |r| {
        let with_syn: BTreeSet<&str> = r
            .iter()
            .filter(|x| x.condition == Condition::Synthesized)
            .map(|x| x.system_id.as_str())
            .collect();
        if with_syn.is_empty() {
            return Err(MetricsError::EmptyInput);
        }
        with_syn.iter().map(|s| dmos_aggregate(r, s)).collect()
    })
}

/// Runs analyze, stats, select and curate on `raw_text`, then QC when a
/// manifest is given. Each stage reads the previous stage's outputs.
pub fn cmd_run(ctx: &Context, raw_text: &Path, manifest: Option<&Path>) -> Result<Vec<StageOutcome>, PipelineError> {
    let analyzed = ctx.out_dir.join("analyzed.jsonl");
    let mut out = vec![
        cmd_analyze(ctx, raw_text)?,
        cmd_stats(ctx, &analyzed)?,
        cmd_select(ctx, &analyzed)?,
        cmd_curate(ctx, &ctx.out_dir.join("script.tsv"))?,
    ];
    if let Some(m) = manifest {
        out.push(cmd_qc(ctx, m)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_lines() {
        let got = parse_text_lines("a\tभारत\n\nदेश\n  \nb\tx\ty\n");
        assert_eq!(
            got,
            vec![
                ("a".to_string(), "भारत".to_string()),
                ("s00003".to_string(), "देश".to_string()),
                ("b".to_string(), "x\ty".to_string()),
            ]
        );
    }

    #[test]
    fn duplicate_ids() {
        assert!(check_unique_ids(["a", "b"]).is_ok());
        assert!(matches!(check_unique_ids(["a", "a"]), Err(PipelineError::DuplicateId(id)) if id == "a"));
    }

    #[test]
    fn tsv_field_count() {
        let p = Path::new("m.tsv");
        assert!(tsv_rows(p, "u1\ta.wav\n", 3, 3).is_err());
        let rows = tsv_rows(p, "# header\nu1\ta.wav\tसब\tठीक\n", 3, 3).unwrap();
        assert_eq!(rows, vec![vec!["u1", "a.wav", "सब\tठीक"]]);
    }
}
