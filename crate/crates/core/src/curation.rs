//! Automated text curation checks run before recording.
//!
//! Checks either apply a fix (punctuation removal, lexicon expansion) or
//! raise a `needs-human` flag and leave the text alone. All spans are byte
//! ranges into the raw text.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::script::{syllabify, tokenize, LanguageConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    FixApplied,
    NeedsHuman,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Punctuation,
    Expansion,
    Numeral,
    Symbol,
    Abbreviation,
    Sensitive,
    LongWord,
    UncommonWord,
    RepeatedPhrase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub span: Span,
    pub severity: Severity,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Edit {
    span: Span,
    replacement: String,
}

/// Output of a single check: its violations plus the edits it wants applied.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Fragment {
    pub violations: Vec<Violation>,
    edits: Vec<Edit>,
}

impl Fragment {
    /// Applies this fragment's fixes to `raw`.
    pub fn apply(&self, raw: &str) -> String {
        apply_edits(raw, &self.edits)
    }

    fn extend(&mut self, other: Fragment) {
        self.violations.extend(other.violations);
        self.edits.extend(other.edits);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurationVerdict {
    pub sentence_id: String,
    pub violations: Vec<Violation>,
    pub normalized_text: String,
}

impl CurationVerdict {
    pub fn needs_human(&self) -> bool {
        self.violations
            .iter()
            .any(|v| v.severity == Severity::NeedsHuman)
    }
}

fn apply_edits(raw: &str, edits: &[Edit]) -> String {
    if edits.is_empty() {
        return raw.to_string();
    }
    let mut edits: Vec<&Edit> = edits.iter().collect();
    edits.sort_by_key(|e| e.span);
    let mut out = String::with_capacity(raw.len());
    let mut pos = 0;
    for e in edits {
        if e.span.start < pos {
            continue;
        }
        out.push_str(&raw[pos..e.span.start]);
        out.push_str(&e.replacement);
        pos = e.span.end;
    }
    out.push_str(&raw[pos..]);
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn is_kept_punct(c: char) -> bool {
    matches!(c, ',' | '.' | '\u{0964}' | '\u{0965}')
}

fn punct_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\p{P}").unwrap())
}

fn symbol_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\p{S}").unwrap())
}

fn abbreviation_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^(?:\p{L}\p{M}*\.){2,}$|\p{Lu}{2,}").unwrap())
}

fn is_removable_punct(c: char) -> bool {
    !is_kept_punct(c) && punct_re().is_match(c.encode_utf8(&mut [0; 4]))
}

/// Removes every punctuation mark except comma, full stop and danda.
///
/// One fix-applied violation is reported per distinct character, spanning
/// its first occurrence. A mark squeezed between two non-space characters
/// becomes a space so words are not glued together.
pub fn check_punctuation(text: &str) -> Fragment {
    check_punctuation_outside(text, &[])
}

fn check_punctuation_outside(text: &str, protected: &[Span]) -> Fragment {
    let mut frag = Fragment::default();
    let mut seen: BTreeMap<char, (Span, usize)> = BTreeMap::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    for (i, &(pos, c)) in chars.iter().enumerate() {
        if !is_removable_punct(c) || protected.iter().any(|s| s.start <= pos && pos < s.end) {
            continue;
        }
        let span = Span {
            start: pos,
            end: pos + c.len_utf8(),
        };
        let between_letters = i > 0
            && !chars[i - 1].1.is_whitespace()
            && chars.get(i + 1).is_some_and(|&(_, n)| !n.is_whitespace());
        frag.edits.push(Edit {
            span,
            replacement: if between_letters { " ".into() } else { String::new() },
        });
        seen.entry(c).or_insert((span, 0)).1 += 1;
    }
    let mut firsts: Vec<(char, Span, usize)> = seen.into_iter().map(|(c, (s, n))| (c, s, n)).collect();
    firsts.sort_by_key(|&(_, s, _)| s);
    for (c, span, n) in firsts {
        frag.violations.push(Violation {
            rule: Rule::Punctuation,
            span,
            severity: Severity::FixApplied,
            detail: format!("removed {c:?} x{n}"),
        });
    }
    frag
}

/// Whitespace tokens with byte offsets.
fn tokens(text: &str) -> impl Iterator<Item = (Span, &str)> {
    text.split_whitespace().map(move |tok| {
        let start = tok.as_ptr() as usize - text.as_ptr() as usize;
        (
            Span {
                start,
                end: start + tok.len(),
            },
            tok,
        )
    })
}

/// Token with surrounding punctuation trimmed, except a trailing full stop
/// (which may belong to an abbreviation).
fn core_of(span: Span, tok: &str) -> (Span, &str) {
    let lead = tok.len() - tok.trim_start_matches(|c: char| punct_re().is_match(c.encode_utf8(&mut [0; 4]))).len();
    let rest = &tok[lead..];
    let kept = rest.trim_end_matches(|c: char| c != '.' && punct_re().is_match(c.encode_utf8(&mut [0; 4])));
    (
        Span {
            start: span.start + lead,
            end: span.start + lead + kept.len(),
        },
        kept,
    )
}

/// Token-to-expansion replacements (abbreviations, symbols).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, String>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, token: impl Into<String>, expansion: impl Into<String>) {
        self.entries.insert(token.into(), expansion.into());
    }

    pub fn get(&self, token: &str) -> Option<&str> {
        self.entries.get(token).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Reads `token<TAB>expansion` lines; blank lines and `#` comments skipped.
    pub fn from_reader(r: impl BufRead) -> std::io::Result<Self> {
        let mut lex = Self::new();
        for line in r.lines() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('\t') else {
                return Err(std::io::Error::new(
                    std::io::ErrorKind::InvalidData,
                    format!("lexicon line without a tab: {line:?}"),
                ));
            };
            lex.insert(k.trim(), v.trim());
        }
        Ok(lex)
    }

    pub fn load(path: impl AsRef<Path>) -> std::io::Result<Self> {
        Self::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

/// Flags numerals, symbols and abbreviation-like tokens for normalization.
/// Tokens with an exact lexicon entry are expanded instead.
pub fn flag_nonlexical(text: &str, lexicon: &Lexicon) -> Fragment {
    let mut frag = Fragment::default();
    for (span, tok) in tokens(text) {
        let (core_span, core) = core_of(span, tok);
        if core.is_empty() {
            continue;
        }
        if let Some(expansion) = lexicon.get(core).or_else(|| lexicon.get(tok)) {
            let span = if lexicon.get(core).is_some() { core_span } else { span };
            frag.edits.push(Edit {
                span,
                replacement: expansion.to_string(),
            });
            frag.violations.push(Violation {
                rule: Rule::Expansion,
                span,
                severity: Severity::FixApplied,
                detail: format!("{core} -> {expansion}"),
            });
            continue;
        }
        let bare = core.trim_end_matches('.');
        let rule = if bare.chars().any(char::is_numeric) {
            Some(Rule::Numeral)
        } else if symbol_re().is_match(core) {
            Some(Rule::Symbol)
        } else if abbreviation_re().is_match(core) {
            Some(Rule::Abbreviation)
        } else {
            None
        };
        if let Some(rule) = rule {
            frag.violations.push(Violation {
                rule,
                span: core_span,
                severity: Severity::NeedsHuman,
                detail: core.to_string(),
            });
        }
    }
    frag
}

/// Runs of letters, marks and digits, lowercased, with spans.
fn words_lower(text: &str) -> Vec<(Span, String)> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| Regex::new(r"[\p{L}\p{M}\p{N}\u{200C}\u{200D}]+").unwrap());
    re.find_iter(text)
        .map(|m| {
            (
                Span {
                    start: m.start(),
                    end: m.end(),
                },
                m.as_str().to_lowercase(),
            )
        })
        .collect()
}

/// Case-insensitive whole-word keyword search. Keywords may span several
/// words. Matches are flagged, never removed.
pub fn flag_sensitive<S: AsRef<str>>(text: &str, keywords: &[S]) -> Fragment {
    let mut frag = Fragment::default();
    if keywords.is_empty() {
        return frag;
    }
    let words = words_lower(text);
    for kw in keywords {
        let needle: Vec<String> = words_lower(kw.as_ref()).into_iter().map(|(_, w)| w).collect();
        if needle.is_empty() || needle.len() > words.len() {
            continue;
        }
        for start in 0..=words.len() - needle.len() {
            let window = &words[start..start + needle.len()];
            if window.iter().zip(&needle).all(|((_, w), n)| w == n) {
                frag.violations.push(Violation {
                    rule: Rule::Sensitive,
                    span: Span {
                        start: window[0].0.start,
                        end: window[needle.len() - 1].0.end,
                    },
                    severity: Severity::NeedsHuman,
                    detail: kw.as_ref().to_string(),
                });
            }
        }
    }
    frag.violations.sort_by_key(|v| v.span);
    frag
}

/// Flags words whose akshara count exceeds `max_syllables`.
pub fn flag_long_words(text: &str, cfg: &LanguageConfig, max_syllables: usize) -> Fragment {
    let mut frag = Fragment::default();
    for (span, tok) in tokens(text) {
        for word in tokenize(tok, cfg).words {
            if let Ok(a) = syllabify(&word, cfg) {
                if a.len() > max_syllables {
                    frag.violations.push(Violation {
                        rule: Rule::LongWord,
                        span,
                        severity: Severity::NeedsHuman,
                        detail: format!("{word}: {} syllables", a.len()),
                    });
                }
            }
        }
    }
    frag
}

/// In-script word counts over a reference corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordFrequency {
    counts: BTreeMap<String, u64>,
}

impl WordFrequency {
    pub fn from_texts<'a>(texts: impl IntoIterator<Item = &'a str>, cfg: &LanguageConfig) -> Self {
        let mut counts = BTreeMap::new();
        for t in texts {
            for w in tokenize(t, cfg).words {
                *counts.entry(w).or_insert(0) += 1;
            }
        }
        Self { counts }
    }

    pub fn count(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }
}

/// Flags words seen fewer than `min_count` times in the reference corpus.
pub fn flag_uncommon(
    text: &str,
    cfg: &LanguageConfig,
    freq: &WordFrequency,
    min_count: u64,
) -> Fragment {
    let mut frag = Fragment::default();
    for (span, tok) in tokens(text) {
        for word in tokenize(tok, cfg).words {
            let n = freq.count(&word);
            if n < min_count {
                frag.violations.push(Violation {
                    rule: Rule::UncommonWord,
                    span,
                    severity: Severity::NeedsHuman,
                    detail: format!("{word}: seen {n}x"),
                });
            }
        }
    }
    frag
}

/// Flags a phrase of 2 to 4 words immediately repeated. Single-word
/// reduplication is ordinary in Indic languages and is not flagged.
pub fn flag_repeated_phrases(text: &str) -> Fragment {
    let mut frag = Fragment::default();
    let words = words_lower(text);
    let mut i = 0;
    while i < words.len() {
        let hit = (2..=4).rev().find(|&n| {
            i + 2 * n <= words.len()
                && (0..n).all(|k| words[i + k].1 == words[i + n + k].1)
        });
        match hit {
            Some(n) => {
                frag.violations.push(Violation {
                    rule: Rule::RepeatedPhrase,
                    span: Span {
                        start: words[i].0.start,
                        end: words[i + 2 * n - 1].0.end,
                    },
                    severity: Severity::NeedsHuman,
                    detail: words[i..i + n]
                        .iter()
                        .map(|(_, w)| w.as_str())
                        .collect::<Vec<_>>()
                        .join(" "),
                });
                i += 2 * n;
            }
            None => i += 1,
        }
    }
    frag
}

/// Settings for a full curation pass.
#[derive(Debug, Clone, Default)]
pub struct Curator {
    pub lexicon: Lexicon,
    pub keywords: Vec<String>,
    /// Enables the long-word check.
    pub language: Option<LanguageConfig>,
    pub max_syllables_per_word: usize,
    /// Enables the uncommon-word check.
    pub word_frequency: Option<(WordFrequency, u64)>,
}

impl Curator {
    pub fn curate(&self, id: &str, raw: &str) -> CurationVerdict {
        let nonlex = flag_nonlexical(raw, &self.lexicon);
        let protected: Vec<Span> = nonlex
            .edits
            .iter()
            .map(|e| e.span)
            .collect();
        let mut all = check_punctuation_outside(raw, &protected);
        all.extend(nonlex);
        all.extend(flag_sensitive(raw, &self.keywords));
        if let Some(cfg) = &self.language {
            all.extend(flag_long_words(raw, cfg, self.max_syllables_per_word));
            if let Some((freq, min)) = &self.word_frequency {
                all.extend(flag_uncommon(raw, cfg, freq, *min));
            }
        }
        all.extend(flag_repeated_phrases(raw));

        let normalized_text = all.apply(raw);
        let mut violations = all.violations;
        violations.sort_by(|a, b| a.span.cmp(&b.span).then(a.rule.cmp(&b.rule)));
        CurationVerdict {
            sentence_id: id.to_string(),
            violations,
            normalized_text,
        }
    }

    pub fn load_keywords(path: impl AsRef<Path>) -> std::io::Result<Vec<String>> {
        let text = std::fs::read_to_string(path)?;
        Ok(text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect())
    }
}
