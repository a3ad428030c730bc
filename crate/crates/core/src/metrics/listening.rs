use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Metric, MetricReport, MetricsError};
use crate::summary::MeanStd;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    #[serde(alias = "gt")]
    GroundTruth,
    #[serde(alias = "syn")]
    Synthesized,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rating {
    #[serde(rename = "evaluator")]
    pub evaluator_id: String,
    #[serde(rename = "system")]
    pub system_id: String,
    #[serde(rename = "item")]
    pub item_id: String,
    pub condition: Condition,
    pub score: u8,
}

/// Parses `evaluator,system,item,condition,score` rows (header required).
pub fn read_ratings<R: Read>(reader: R) -> Result<Vec<Rating>, MetricsError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<Rating>().enumerate() {
        let rating = row?;
        if !(1..=5).contains(&rating.score) {
            return Err(MetricsError::InvalidScore {
                line: i + 2,
                score: rating.score,
            });
        }
        out.push(rating);
    }
    Ok(out)
}

pub fn load_ratings(path: impl AsRef<Path>) -> Result<Vec<Rating>, MetricsError> {
    read_ratings(std::fs::File::open(path)?)
}

/// System ids in sorted order.
pub fn systems(ratings: &[Rating]) -> BTreeSet<String> {
    ratings.iter().map(|r| r.system_id.clone()).collect()
}

/// Mean and population std over every score for `system`.
pub fn mos_aggregate(ratings: &[Rating], system: &str) -> Result<MetricReport, MetricsError> {
    let mine: Vec<&Rating> = ratings.iter().filter(|r| r.system_id == system).collect();
    let scores: Vec<f64> = mine.iter().map(|r| r.score as f64).collect();
    let stats = MeanStd::of(&scores).ok_or_else(|| MetricsError::NoRatings(system.to_string()))?;
    let evaluators: BTreeSet<&str> = mine.iter().map(|r| r.evaluator_id.as_str()).collect();
    let items: BTreeSet<&str> = mine.iter().map(|r| r.item_id.as_str()).collect();
    Ok(MetricReport {
        system: system.to_string(),
        metric: Metric::Mos,
        mean: stats.mean,
        std: stats.std,
        n_evaluators: Some(evaluators.len()),
        n_items: items.len(),
    })
}

/// Per-evaluator `5 * mean(synthesized) / mean(ground truth)` for `system`.
pub fn dmos_per_evaluator(
    ratings: &[Rating],
    system: &str,
) -> Result<BTreeMap<String, f64>, MetricsError> {
    let mut sums: BTreeMap<&str, [(f64, usize); 2]> = BTreeMap::new();
    for r in ratings.iter().filter(|r| r.system_id == system) {
        let slot = &mut sums.entry(&r.evaluator_id).or_default()[r.condition as usize];
        slot.0 += r.score as f64;
        slot.1 += 1;
    }
    if sums.is_empty() {
        return Err(MetricsError::NoRatings(system.to_string()));
    }
    sums.into_iter()
        .map(|(evaluator, [gt, syn])| {
            let missing = if gt.1 == 0 {
                Some(Condition::GroundTruth)
            } else if syn.1 == 0 {
                Some(Condition::Synthesized)
            } else {
                None
            };
            if let Some(condition) = missing {
                return Err(MetricsError::MissingCondition {
                    evaluator: evaluator.to_string(),
                    condition,
                });
            }
            let gt_mean = gt.0 / gt.1 as f64;
            let syn_mean = syn.0 / syn.1 as f64;
            Ok((evaluator.to_string(), 5.0 * syn_mean / gt_mean))
        })
        .collect()
}

pub fn dmos_aggregate(ratings: &[Rating], system: &str) -> Result<MetricReport, MetricsError> {
    let per = dmos_per_evaluator(ratings, system)?;
    let values: Vec<f64> = per.values().copied().collect();
    let stats = MeanStd::of(&values).expect("at least one evaluator");
    let items: BTreeSet<&str> = ratings
        .iter()
        .filter(|r| r.system_id == system && r.condition == Condition::Synthesized)
        .map(|r| r.item_id.as_str())
        .collect();
    Ok(MetricReport {
        system: system.to_string(),
        metric: Metric::Dmos,
        mean: stats.mean,
        std: stats.std,
        n_evaluators: Some(values.len()),
        n_items: items.len(),
    })
}
