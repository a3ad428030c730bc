//! Syllable and phone frequency tables, rank-frequency fits and weak-phone
//! ranking.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::script::SentenceRecord;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("sentence id {0:?} already accumulated")]
    DuplicateSentenceId(String),
    #[error("need at least 2 ranks with count >= {min_count}, found {found}")]
    InsufficientData { min_count: u64, found: usize },
}

/// Mergeable frequency tables over a set of sentences.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub syllable_freq: BTreeMap<String, u64>,
    pub phone_freq: BTreeMap<String, u64>,
    pub sentence_count: usize,
    /// Ids of the sentences containing each phone.
    pub postings: BTreeMap<String, BTreeSet<String>>,
    sentence_ids: BTreeSet<String>,
}

impl CorpusStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records<'a>(
        records: impl IntoIterator<Item = &'a SentenceRecord>,
    ) -> Result<Self, StatsError> {
        let mut stats = Self::new();
        for rec in records {
            stats.accumulate(rec)?;
        }
        Ok(stats)
    }

    pub fn accumulate(&mut self, rec: &SentenceRecord) -> Result<(), StatsError> {
        if !self.sentence_ids.insert(rec.id.clone()) {
            return Err(StatsError::DuplicateSentenceId(rec.id.clone()));
        }
        for syl in rec.syllables_per_word.iter().flatten() {
            *self.syllable_freq.entry(syl.clone()).or_default() += 1;
        }
        for phone in &rec.phones {
            *self.phone_freq.entry(phone.clone()).or_default() += 1;
            self.postings
                .entry(phone.clone())
                .or_default()
                .insert(rec.id.clone());
        }
        self.sentence_count += 1;
        Ok(())
    }

    /// Combines stats built over disjoint sentence sets.
    pub fn merge(mut self, other: &CorpusStats) -> Result<Self, StatsError> {
        if let Some(dup) = self.sentence_ids.intersection(&other.sentence_ids).next() {
            return Err(StatsError::DuplicateSentenceId(dup.clone()));
        }
        self.sentence_ids.extend(other.sentence_ids.iter().cloned());
        for (k, v) in &other.syllable_freq {
            *self.syllable_freq.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.phone_freq {
            *self.phone_freq.entry(k.clone()).or_default() += v;
        }
        for (k, ids) in &other.postings {
            self.postings
                .entry(k.clone())
                .or_default()
                .extend(ids.iter().cloned());
        }
        self.sentence_count += other.sentence_count;
        Ok(self)
    }

    pub fn contains_sentence(&self, id: &str) -> bool {
        self.sentence_ids.contains(id)
    }

    pub fn total_syllables(&self) -> u64 {
        self.syllable_freq.values().sum()
    }

    /// Number of sentences containing `phone` at least once.
    pub fn sentences_with(&self, phone: &str) -> usize {
        self.postings.get(phone).map_or(0, BTreeSet::len)
    }

    /// Syllables by descending count, ties by label.
    pub fn ranked_syllables(&self) -> Vec<(&str, u64)> {
        ranked(&self.syllable_freq)
    }

    pub fn ranked_phones(&self) -> Vec<(&str, u64)> {
        ranked(&self.phone_freq)
    }

    pub fn zipf_fit(&self, min_count: u64) -> Result<ZipfFit, StatsError> {
        zipf_fit_counts(self.syllable_freq.values().copied(), min_count)
    }

    /// The `k` phones with the lowest token counts, ascending, ties by label.
    pub fn weak_phones(&self, k: usize) -> Vec<WeakPhone> {
        self.weak_phones_among(k, std::iter::empty::<&str>())
    }

    /// Like [`weak_phones`](Self::weak_phones), but phones listed in
    /// `universe` that never occur here take part with a count of zero.
    pub fn weak_phones_among<'a>(
        &self,
        k: usize,
        universe: impl IntoIterator<Item = &'a str>,
    ) -> Vec<WeakPhone> {
        let mut all: BTreeMap<&str, u64> = self
            .phone_freq
            .iter()
            .map(|(p, &c)| (p.as_str(), c))
            .collect();
        for p in universe {
            all.entry(p).or_insert(0);
        }
        let mut rows: Vec<WeakPhone> = all
            .into_iter()
            .map(|(phone, count)| WeakPhone {
                phone: phone.to_string(),
                count,
                sentences: self.sentences_with(phone),
            })
            .collect();
        rows.sort_by(|a, b| a.count.cmp(&b.count).then_with(|| a.phone.cmp(&b.phone)));
        rows.truncate(k);
        rows
    }

    /// `unit,count,rank` rows for the syllable table.
    pub fn write_syllable_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        write_ranked_csv(out, &self.ranked_syllables())
    }

    pub fn write_phone_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        write_ranked_csv(out, &self.ranked_phones())
    }
}

fn ranked(freq: &BTreeMap<String, u64>) -> Vec<(&str, u64)> {
    let mut rows: Vec<(&str, u64)> = freq.iter().map(|(k, &v)| (k.as_str(), v)).collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    rows
}

fn write_ranked_csv<W: Write>(out: W, rows: &[(&str, u64)]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["unit", "count", "rank"])?;
    for (i, (unit, count)) in rows.iter().enumerate() {
        w.write_record([unit.to_string(), count.to_string(), (i + 1).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakPhone {
    pub phone: String,
    /// Token count.
    pub count: u64,
    /// Containing-sentence count.
    pub sentences: usize,
}

/// `phone,count,sentences` rows, the data behind a phone-distribution bar chart.
pub fn write_weak_phone_csv<W: Write>(out: W, rows: &[WeakPhone]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["phone", "count", "sentences"])?;
    for r in rows {
        w.write_record([r.phone.clone(), r.count.to_string(), r.sentences.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares line through (ln rank, ln frequency).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZipfFit {
    /// Negated slope; positive for Zipf-like data.
    pub exponent: f64,
    /// ln of the fitted frequency at rank 1.
    pub intercept: f64,
    pub r_squared: f64,
    pub ranks_used: usize,
}

/// Fits counts given in any order. Counts below `min_count` are dropped
/// before ranking.
pub fn zipf_fit_counts(
    counts: impl IntoIterator<Item = u64>,
    min_count: u64,
) -> Result<ZipfFit, StatsError> {
    let mut kept: Vec<u64> = counts
        .into_iter()
        .filter(|&c| c >= min_count && c > 0)
        .collect();
    if kept.len() < 2 {
        return Err(StatsError::InsufficientData {
            min_count,
            found: kept.len(),
        });
    }
    kept.sort_unstable_by(|a, b| b.cmp(a));

    let n = kept.len() as f64;
    let xs: Vec<f64> = (1..=kept.len()).map(|r| (r as f64).ln()).collect();
    let ys: Vec<f64> = kept.iter().map(|&c| (c as f64).ln()).collect();
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    // a flat distribution is fitted exactly by a horizontal line
    let r_squared = if syy <= f64::EPSILON * n {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(ZipfFit {
        exponent: -slope,
        intercept,
        r_squared,
        ranks_used: kept.len(),
    })
}
