use serde::{Deserialize, Serialize};

use super::akshara::{is_sentence_punct, phones_of, syllabify, SegmentError};
use super::config::{CharClass, CodePoint, LanguageConfig};

/// How unmapped or foreign letters inside a sentence are treated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Reject the sentence.
    #[default]
    Strict,
    /// Drop the character and keep a warning on the record.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub id: String,
    pub raw_text: String,
    pub words: Vec<String>,
    pub syllables_per_word: Vec<Vec<String>>,
    pub phones: Vec<String>,
    pub word_count: usize,
    pub syllable_count: usize,
    /// Digits, symbols or (lenient mode) foreign letters were dropped.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub needs_normalization: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl SentenceRecord {
    /// Distinct syllables, sorted.
    pub fn syllable_set(&self) -> std::collections::BTreeSet<&str> {
        self.syllables_per_word
            .iter()
            .flatten()
            .map(String::as_str)
            .collect()
    }

    pub fn phone_set(&self) -> std::collections::BTreeSet<&str> {
        self.phones.iter().map(String::as_str).collect()
    }

    pub fn max_word_syllables(&self) -> usize {
        self.syllables_per_word.iter().map(Vec::len).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum RejectReason {
    #[error("sentence has no in-script words")]
    EmptySentence,
    #[error("unknown codepoint {codepoint} in word {word:?}")]
    UnknownCodepoint { codepoint: String, word: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub id: String,
    pub raw_text: String,
    #[serde(flatten)]
    pub reason: RejectReason,
}

fn unknown(cp: char, word: &str) -> RejectReason {
    RejectReason::UnknownCodepoint {
        codepoint: CodePoint(cp).to_string(),
        word: word.to_string(),
    }
}

/// Splits, segments and phonetizes one sentence.
///
/// Punctuation is dropped silently. Digits and symbols set
/// `needs_normalization` and are dropped. Letters the config cannot map
/// (foreign-script letters or unmapped in-block codepoints) reject the
/// sentence in strict mode and are dropped with a warning in lenient mode.
pub fn analyze_sentence(
    id: &str,
    text: &str,
    cfg: &LanguageConfig,
    mode: Mode,
) -> Result<SentenceRecord, Rejection> {
    let reject = |reason| Rejection {
        id: id.to_string(),
        raw_text: text.to_string(),
        reason,
    };

    let mut rec = SentenceRecord {
        id: id.to_string(),
        raw_text: text.to_string(),
        words: Vec::new(),
        syllables_per_word: Vec::new(),
        phones: Vec::new(),
        word_count: 0,
        syllable_count: 0,
        needs_normalization: false,
        warnings: Vec::new(),
    };

    for token in text.split_whitespace() {
        let mut word = String::with_capacity(token.len());
        for c in token.chars() {
            let class = cfg.classify(c);
            if matches!(class, CharClass::Foreign | CharClass::Unmapped) {
                if is_sentence_punct(c) || c.is_ascii_punctuation() || is_punct_like(c) {
                    continue;
                }
                if c.is_numeric() || !c.is_alphabetic() {
                    rec.needs_normalization = true;
                    continue;
                }
                match mode {
                    Mode::Strict => return Err(reject(unknown(c, token))),
                    Mode::Lenient => {
                        if class == CharClass::Foreign {
                            rec.needs_normalization = true;
                        }
                        rec.warnings
                            .push(format!("dropped {} from {token:?}", CodePoint(c)));
                        continue;
                    }
                }
            }
            word.push(c);
        }
        if word.is_empty() {
            continue;
        }
        let aksharas = match syllabify(&word, cfg) {
            Ok(a) => a,
            Err(SegmentError::UnknownCodepoint(cp)) => return Err(reject(unknown(cp.0, token))),
            Err(SegmentError::EmptyWord) => continue,
        };
        rec.phones.extend(phones_of(&aksharas, cfg));
        rec.syllables_per_word
            .push(aksharas.into_iter().map(|a| a.text).collect());
        rec.words.push(word);
    }

    if rec.words.is_empty() {
        return Err(reject(RejectReason::EmptySentence));
    }
    rec.word_count = rec.words.len();
    rec.syllable_count = rec.syllables_per_word.iter().map(Vec::len).sum();
    Ok(rec)
}

/// General punctuation and quotation marks outside ASCII.
fn is_punct_like(c: char) -> bool {
    matches!(c,
        '\u{2010}'..='\u{2027}' | '\u{2030}'..='\u{205E}' | '\u{00A1}' | '\u{00A7}' | '\u{00AB}'
        | '\u{00B6}' | '\u{00B7}' | '\u{00BB}' | '\u{00BF}' | '\u{3001}'..='\u{3003}'
        | '\u{0970}' | '\u{0DF4}' | '\u{104A}' | '\u{104B}' | '\u{1C7E}' | '\u{1C7F}')
}
