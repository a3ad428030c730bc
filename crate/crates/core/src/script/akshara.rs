//! Word splitting, akshara segmentation and rule-based phone mapping.

use serde::{Deserialize, Serialize};

use super::config::{CharClass, CodePoint, LanguageConfig};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SegmentError {
    #[error("empty word")]
    EmptyWord,
    #[error("unknown codepoint {0}")]
    UnknownCodepoint(CodePoint),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AksharaKind {
    /// One or more consonants joined by viramas, with an optional vowel sign.
    ConsonantCluster,
    IndependentVowel,
    /// Orphan signs and marks with no base letter.
    Other,
}

/// One orthographic syllable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Akshara {
    pub text: String,
    pub kind: AksharaKind,
}

/// Result of splitting a line into in-script words.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tokens {
    pub words: Vec<String>,
    /// Characters removed from the words, in input order.
    pub stripped: Vec<char>,
}

/// Full stop marks that belong to the script block but never to a word.
pub(crate) fn is_sentence_punct(c: char) -> bool {
    matches!(c, '\u{0964}' | '\u{0965}')
}

/// Whitespace split that keeps only script letters (and joiners).
///
/// Commas, full stops, dandas and anything outside the script block are
/// moved to [`Tokens::stripped`]. Words emptied by stripping are dropped.
pub fn tokenize(text: &str, cfg: &LanguageConfig) -> Tokens {
    let mut out = Tokens::default();
    for token in text.split_whitespace() {
        let mut word = String::with_capacity(token.len());
        for c in token.chars() {
            let keep = match cfg.classify(c) {
                CharClass::Foreign => false,
                CharClass::Unmapped => !is_sentence_punct(c) && !c.is_numeric(),
                _ => true,
            };
            if keep {
                word.push(c);
            } else {
                out.stripped.push(c);
            }
        }
        if !word.is_empty() {
            out.words.push(word);
        }
    }
    out
}

/// Greedy left-to-right akshara segmentation.
///
/// A consonant absorbs a following nukta; a virama followed by another
/// consonant continues the cluster (joiners after the virama are carried
/// along). The cluster then takes at most one vowel sign and any run of
/// nasalization marks. A trailing virama with no consonant after it stays
/// on the cluster, giving a dead-consonant akshara.
pub fn syllabify(word: &str, cfg: &LanguageConfig) -> Result<Vec<Akshara>, SegmentError> {
    if word.is_empty() {
        return Err(SegmentError::EmptyWord);
    }
    let chars: Vec<(usize, char, CharClass)> = word
        .char_indices()
        .map(|(i, c)| (i, c, cfg.classify(c)))
        .collect();
    if let Some(&(_, c, _)) = chars
        .iter()
        .find(|(_, _, class)| matches!(class, CharClass::Unmapped | CharClass::Foreign))
    {
        return Err(SegmentError::UnknownCodepoint(CodePoint(c)));
    }

    let class_at = |i: usize| chars.get(i).map(|&(_, _, class)| class);
    let absorb = |i: &mut usize, want: &[CharClass]| {
        while let Some(class) = class_at(*i) {
            if want.contains(&class) {
                *i += 1;
            } else {
                break;
            }
        }
    };

    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let start = i;
        let kind = match chars[i].2 {
            CharClass::Consonant => {
                i += 1;
                absorb(&mut i, &[CharClass::Nukta]);
                let mut dead = false;
                while class_at(i) == Some(CharClass::Virama) {
                    i += 1;
                    absorb(&mut i, &[CharClass::Joiner]);
                    if class_at(i) == Some(CharClass::Consonant) {
                        i += 1;
                        absorb(&mut i, &[CharClass::Nukta]);
                    } else {
                        dead = true;
                        break;
                    }
                }
                if !dead && class_at(i) == Some(CharClass::VowelSign) {
                    i += 1;
                }
                absorb(&mut i, &[CharClass::Mark, CharClass::Joiner]);
                AksharaKind::ConsonantCluster
            }
            CharClass::IndependentVowel => {
                i += 1;
                absorb(&mut i, &[CharClass::Mark, CharClass::Joiner]);
                AksharaKind::IndependentVowel
            }
            _ => {
                i += 1;
                absorb(&mut i, &[CharClass::Mark, CharClass::Joiner]);
                AksharaKind::Other
            }
        };
        let begin = chars[start].0;
        let end = chars.get(i).map_or(word.len(), |&(b, _, _)| b);
        out.push(Akshara {
            text: word[begin..end].to_string(),
            kind,
        });
    }
    Ok(out)
}

/// Maps an already-segmented word to phone labels.
pub fn phones_of(aksharas: &[Akshara], cfg: &LanguageConfig) -> Vec<String> {
    let mut phones = Vec::new();
    let last = aksharas.len().saturating_sub(1);
    for (idx, akshara) in aksharas.iter().enumerate() {
        let chars: Vec<char> = akshara.text.chars().collect();
        let mut j = 0;
        while j < chars.len() {
            let c = chars[j];
            match cfg.classify(c) {
                CharClass::Consonant => {
                    let mut k = j + 1;
                    while k < chars.len() && cfg.classify(chars[k]) == CharClass::Nukta {
                        k += 1;
                    }
                    let phone = match k > j + 1 {
                        true => cfg.nukta_phone(c),
                        false => None,
                    };
                    phones.push(phone.unwrap_or(&cfg.consonants[&c]).to_string());
                    let next = chars.get(k).map(|&n| cfg.classify(n));
                    let bare = !matches!(next, Some(CharClass::Virama | CharClass::VowelSign));
                    let final_schwa = cfg.schwa_deletion && idx == last;
                    if bare && !final_schwa && !cfg.dead_consonants.contains(&c) {
                        phones.push(cfg.inherent_vowel.clone());
                    }
                    j = k;
                    continue;
                }
                CharClass::VowelSign => phones.push(cfg.vowel_signs[&c].clone()),
                CharClass::IndependentVowel => phones.push(cfg.independent_vowels[&c].clone()),
                CharClass::Mark => {
                    if let Some(p) = cfg.mark_phones.get(&c) {
                        phones.push(p.clone());
                    }
                }
                _ => {}
            }
            j += 1;
        }
    }
    phones
}

pub fn to_phones(word: &str, cfg: &LanguageConfig) -> Result<Vec<String>, SegmentError> {
    Ok(phones_of(&syllabify(word, cfg)?, cfg))
}
