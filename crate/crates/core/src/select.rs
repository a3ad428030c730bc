//! Recording-script selection: readability filter, greedy syllable
//! coverage and weak-phone augmentation.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::script::SentenceRecord;
use crate::stats::CorpusStats;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SelectError {
    #[error("candidate pool is empty")]
    EmptyPool,
    #[error("sentence id {0:?} occurs twice in the pool")]
    DuplicateSentenceId(String),
    #[error("invalid constraints: {0}")]
    InvalidConstraints(String),
    #[error("target coverage {0} outside [0, 1]")]
    InvalidTarget(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionConstraints {
    pub min_words: usize,
    pub max_words: usize,
    pub max_syllables_per_word: usize,
}

impl Default for SelectionConstraints {
    fn default() -> Self {
        Self {
            min_words: 5,
            max_words: 15,
            max_syllables_per_word: 5,
        }
    }
}

impl SelectionConstraints {
    pub fn validate(&self) -> Result<(), SelectError> {
        if self.min_words < 1 || self.min_words > self.max_words {
            return Err(SelectError::InvalidConstraints(format!(
                "need 1 <= min_words <= max_words, got {}..{}",
                self.min_words, self.max_words
            )));
        }
        if self.max_syllables_per_word < 1 {
            return Err(SelectError::InvalidConstraints(
                "max_syllables_per_word must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// First violated rule, if any.
    pub fn check(&self, rec: &SentenceRecord) -> Option<FilterRule> {
        if rec.word_count < self.min_words {
            return Some(FilterRule::TooShort {
                words: rec.word_count,
            });
        }
        if rec.word_count > self.max_words {
            return Some(FilterRule::TooLong {
                words: rec.word_count,
            });
        }
        rec.words
            .iter()
            .zip(&rec.syllables_per_word)
            .find(|(_, s)| s.len() > self.max_syllables_per_word)
            .map(|(w, s)| FilterRule::WordTooLong {
                word: w.clone(),
                syllables: s.len(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum FilterRule {
    TooShort { words: usize },
    TooLong { words: usize },
    WordTooLong { word: String, syllables: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterRejection {
    pub id: String,
    #[serde(flatten)]
    pub rule: FilterRule,
}

pub fn filter(
    pool: &[SentenceRecord],
    c: &SelectionConstraints,
) -> (Vec<SentenceRecord>, Vec<FilterRejection>) {
    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    for rec in pool {
        match c.check(rec) {
            None => accepted.push(rec.clone()),
            Some(rule) => rejected.push(FilterRejection {
                id: rec.id.clone(),
                rule,
            }),
        }
    }
    (accepted, rejected)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopCriterion {
    Budget(usize),
    TargetCoverage(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentationPolicy {
    pub weak_k: usize,
    pub target_sentences_per_weak_phone: usize,
}

impl Default for AugmentationPolicy {
    fn default() -> Self {
        Self {
            weak_k: 20,
            target_sentences_per_weak_phone: 50,
        }
    }
}

impl AugmentationPolicy {
    pub fn validate(&self) -> Result<(), SelectError> {
        if self.weak_k < 1 || self.target_sentences_per_weak_phone < 1 {
            return Err(SelectError::InvalidConstraints(
                "weak_k and target_sentences_per_weak_phone must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "warning", rename_all = "snake_case")]
pub enum SelectionWarning {
    /// No remaining sentence adds coverage before the target was reached.
    CoverageStalled { achieved: f64, target: f64 },
    /// The pool has too few sentences containing `phone`.
    PoolExhausted { phone: String, achieved: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Addition {
    pub phone: String,
    pub ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub selected_ids: Vec<String>,
    pub covered_syllables: BTreeSet<String>,
    pub coverage_ratio: f64,
    pub augmentation_additions: Vec<Addition>,
    pub warnings: Vec<SelectionWarning>,
}

fn check_unique(pool: &[SentenceRecord]) -> Result<(), SelectError> {
    let mut seen = BTreeSet::new();
    for rec in pool {
        if !seen.insert(rec.id.as_str()) {
            return Err(SelectError::DuplicateSentenceId(rec.id.clone()));
        }
    }
    Ok(())
}

fn ratio(covered: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        covered as f64 / total as f64
    }
}

/// Candidate priority: more gain first, then fewer syllables, then lower id.
#[derive(Debug, PartialEq, Eq)]
struct Candidate {
    gain: usize,
    syllables: Reverse<usize>,
    id_rank: Reverse<usize>,
    index: usize,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.gain, self.syllables, self.id_rank).cmp(&(other.gain, other.syllables, other.id_rank))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy maximum-coverage selection over distinct syllables.
///
/// Each step takes the sentence adding the most not-yet-covered syllables
/// (ties: fewer syllables, then lexicographically smaller id). Selection
/// stops at the budget, on reaching the target fraction of the pool's
/// syllable inventory, or when no sentence adds anything. Marginal gains
/// only shrink, so stale heap entries are upper bounds and are re-scored
/// lazily; the result equals the plain greedy scan.
pub fn greedy_select(
    pool: &[SentenceRecord],
    stop: StopCriterion,
) -> Result<SelectionResult, SelectError> {
    let inventory: BTreeSet<&str> = pool.iter().flat_map(SentenceRecord::syllable_set).collect();
    greedy_select_against(pool, &inventory, stop)
}

/// Like [`greedy_select`], but coverage is measured against `inventory`,
/// which may hold syllables no pool sentence contains (for example those
/// of sentences removed by the filter). A full target then stalls.
pub fn greedy_select_against(
    pool: &[SentenceRecord],
    inventory: &BTreeSet<&str>,
    stop: StopCriterion,
) -> Result<SelectionResult, SelectError> {
    if pool.is_empty() {
        return Err(SelectError::EmptyPool);
    }
    check_unique(pool)?;
    if let StopCriterion::TargetCoverage(t) = stop {
        if !(0.0..=1.0).contains(&t) {
            return Err(SelectError::InvalidTarget(t));
        }
    }

    let sets: Vec<BTreeSet<&str>> = pool.iter().map(SentenceRecord::syllable_set).collect();
    let total = sets.iter().flatten().chain(inventory.iter()).collect::<BTreeSet<_>>().len();
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&a, &b| pool[a].id.cmp(&pool[b].id));
    let mut id_rank = vec![0; pool.len()];
    for (rank, &i) in order.iter().enumerate() {
        id_rank[i] = rank;
    }

    let mut heap: BinaryHeap<Candidate> = (0..pool.len())
        .map(|i| Candidate {
            gain: sets[i].len(),
            syllables: Reverse(pool[i].syllable_count),
            id_rank: Reverse(id_rank[i]),
            index: i,
        })
        .collect();

    let mut covered: BTreeSet<&str> = BTreeSet::new();
    let mut selected = Vec::new();
    let mut warnings = Vec::new();
    let reached = |covered: usize| match stop {
        StopCriterion::Budget(_) => false,
        StopCriterion::TargetCoverage(t) => ratio(covered, total) >= t,
    };
    let budget = match stop {
        StopCriterion::Budget(b) => b,
        StopCriterion::TargetCoverage(_) => usize::MAX,
    };

    while selected.len() < budget && !reached(covered.len()) {
        let Some(mut top) = heap.pop() else { break };
        top.gain = sets[top.index].difference(&covered).count();
        if heap.peek().is_some_and(|next| *next > top) {
            heap.push(top);
            continue;
        }
        if top.gain == 0 {
            break;
        }
        covered.extend(sets[top.index].iter().copied());
        selected.push(top.index);
    }

    if let StopCriterion::TargetCoverage(t) = stop {
        let achieved = ratio(covered.len(), total);
        if achieved < t {
            warnings.push(SelectionWarning::CoverageStalled {
                achieved,
                target: t,
            });
        }
    }

    Ok(SelectionResult {
        selected_ids: selected.iter().map(|&i| pool[i].id.clone()).collect(),
        coverage_ratio: ratio(covered.len(), total),
        covered_syllables: covered.into_iter().map(str::to_string).collect(),
        augmentation_additions: Vec::new(),
        warnings,
    })
}

/// Sets `coverage_ratio` to the covered share of `inventory` plus any
/// covered syllables outside it.
pub fn recompute_coverage(result: &mut SelectionResult, inventory: &BTreeSet<&str>) {
    let total = result
        .covered_syllables
        .iter()
        .map(String::as_str)
        .chain(inventory.iter().copied())
        .collect::<BTreeSet<_>>()
        .len();
    result.coverage_ratio = ratio(result.covered_syllables.len(), total);
}

/// Adds pool sentences until each weak phone of the selection occurs in at
/// least the target number of selected sentences, or the pool runs out.
///
/// Weak phones are the `weak_k` lowest-count phones of `selection_stats`;
/// phones present in the pool but absent from the selection count as zero.
/// Each step adds the unselected sentence containing the most
/// still-deficient weak phones (ties: fewer syllables, then id).
pub fn augment_weak(
    selection: &SelectionResult,
    pool: &[SentenceRecord],
    selection_stats: &CorpusStats,
    policy: &AugmentationPolicy,
) -> SelectionResult {
    let target = policy.target_sentences_per_weak_phone;
    let pool_phones: BTreeSet<&str> = pool.iter().flat_map(|r| r.phones.iter().map(String::as_str)).collect();
    let weak: Vec<String> = selection_stats
        .weak_phones_among(policy.weak_k, pool_phones.iter().copied())
        .into_iter()
        .map(|w| w.phone)
        .collect();

    let mut result = selection.clone();
    let mut chosen: BTreeSet<&str> = selection.selected_ids.iter().map(String::as_str).collect();
    let mut have: BTreeMap<&str, usize> = weak.iter().map(|p| (p.as_str(), 0)).collect();
    for rec in pool.iter().filter(|r| chosen.contains(r.id.as_str())) {
        for p in rec.phone_set() {
            if let Some(n) = have.get_mut(p) {
                *n += 1;
            }
        }
    }

    let mut added: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let mut covered: BTreeSet<String> = selection.covered_syllables.clone();
    loop {
        let deficient: BTreeSet<&str> = have
            .iter()
            .filter(|(_, &n)| n < target)
            .map(|(&p, _)| p)
            .collect();
        if deficient.is_empty() {
            break;
        }
        let best = pool
            .iter()
            .filter(|r| !chosen.contains(r.id.as_str()))
            .map(|r| {
                let hits = r.phone_set().intersection(&deficient).count();
                (hits, r)
            })
            .filter(|(hits, _)| *hits > 0)
            .max_by(|(ha, a), (hb, b)| {
                ha.cmp(hb)
                    .then_with(|| b.syllable_count.cmp(&a.syllable_count))
                    .then_with(|| b.id.cmp(&a.id))
            });
        let Some((_, rec)) = best else {
            for q in deficient {
                result.warnings.push(SelectionWarning::PoolExhausted {
                    phone: q.to_string(),
                    achieved: have[q],
                });
            }
            break;
        };
        chosen.insert(rec.id.as_str());
        result.selected_ids.push(rec.id.clone());
        covered.extend(rec.syllables_per_word.iter().flatten().cloned());
        for p in rec.phone_set() {
            if let Some(n) = have.get_mut(p) {
                if deficient.contains(p) {
                    added.entry(p).or_default().push(rec.id.clone());
                }
                *n += 1;
            }
        }
    }

    let inventory: BTreeSet<&str> = pool.iter().flat_map(|r| r.syllable_set()).collect();
    result.coverage_ratio = ratio(covered.len(), inventory.len());
    result.covered_syllables = covered;
    result.augmentation_additions = weak
        .iter()
        .filter_map(|p| {
            added.remove(p.as_str()).map(|ids| Addition {
                phone: p.clone(),
                ids,
            })
        })
        .collect();
    result
}
