//! Per-language script definitions.
//!
//! A [`LanguageConfig`] is loaded from a TOML file in which every codepoint
//! is written as `U+XXXX`:
//!
//! ```toml
//! language_id = "hi"
//! script_block = ["U+0900", "U+097F"]
//! virama = "U+094D"
//! inherent_vowel = "a"
//! schwa_deletion = false
//! nasalization_marks = ["U+0901", "U+0902"]
//! phones = ["a", "aa", "k"]
//!
//! [consonants]
//! "U+0915" = "k"
//!
//! [vowel_signs]
//! "U+093E" = "aa"
//!
//! [independent_vowels]
//! "U+0905" = "a"
//! ```
//!
//! Optional keys: `nukta`, `dead_consonants` (letters that never carry the
//! inherent vowel, e.g. Bengali khanda ta) and a `[mark_phones]` table
//! giving a phone to some of the nasalization marks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::Deserialize;

pub const ZWJ: char = '\u{200D}';
pub const ZWNJ: char = '\u{200C}';

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read language config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed language config: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("bad codepoint literal {0:?} (expected U+XXXX)")]
    BadCodepoint(String),
    #[error("script block is empty: {0} > {1}")]
    EmptyBlock(CodePoint, CodePoint),
    #[error("{cp} in {table} lies outside the script block")]
    OutsideBlock { cp: CodePoint, table: &'static str },
    #[error("{cp} appears in both {first} and {second}")]
    Overlap {
        cp: CodePoint,
        first: &'static str,
        second: &'static str,
    },
    #[error("virama {0} must not appear in any phone map")]
    ViramaMapped(CodePoint),
    #[error("empty phone label for {0}")]
    EmptyLabel(CodePoint),
    #[error("phone {label:?} is not in the declared inventory")]
    UndeclaredPhone { label: String },
}

/// Codepoint wrapper that prints as `U+XXXX`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CodePoint(pub char);

impl fmt::Display for CodePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U+{:04X}", self.0 as u32)
    }
}

impl serde::Serialize for CodePoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn parse_codepoint(s: &str) -> Result<char, ConfigError> {
    let bad = || ConfigError::BadCodepoint(s.to_string());
    let hex = s
        .strip_prefix("U+")
        .or_else(|| s.strip_prefix("u+"))
        .ok_or_else(bad)?;
    if hex.is_empty() || hex.len() > 6 {
        return Err(bad());
    }
    let value = u32::from_str_radix(hex, 16).map_err(|_| bad())?;
    char::from_u32(value).ok_or_else(bad)
}

/// How a codepoint participates in akshara segmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharClass {
    Consonant,
    VowelSign,
    IndependentVowel,
    Virama,
    Nukta,
    Mark,
    Joiner,
    /// In the script block but not described by the config.
    Unmapped,
    /// Outside the script block.
    Foreign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageConfig {
    pub language_id: String,
    pub script_block: (char, char),
    pub virama: char,
    pub nukta: Option<char>,
    pub inherent_vowel: String,
    pub consonants: BTreeMap<char, String>,
    pub vowel_signs: BTreeMap<char, String>,
    pub independent_vowels: BTreeMap<char, String>,
    pub schwa_deletion: bool,
    pub nasalization_marks: BTreeSet<char>,
    pub mark_phones: BTreeMap<char, String>,
    pub dead_consonants: BTreeSet<char>,
    pub phones: BTreeSet<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    language_id: String,
    script_block: [String; 2],
    virama: String,
    #[serde(default)]
    nukta: Option<String>,
    inherent_vowel: String,
    #[serde(default)]
    schwa_deletion: bool,
    #[serde(default)]
    nasalization_marks: Vec<String>,
    #[serde(default)]
    dead_consonants: Vec<String>,
    phones: Vec<String>,
    consonants: BTreeMap<String, String>,
    vowel_signs: BTreeMap<String, String>,
    independent_vowels: BTreeMap<String, String>,
    #[serde(default)]
    mark_phones: BTreeMap<String, String>,
}

fn parse_map(raw: BTreeMap<String, String>) -> Result<BTreeMap<char, String>, ConfigError> {
    raw.into_iter()
        .map(|(k, v)| Ok((parse_codepoint(&k)?, v)))
        .collect()
}

fn parse_set(raw: &[String]) -> Result<BTreeSet<char>, ConfigError> {
    raw.iter().map(|s| parse_codepoint(s)).collect()
}

impl LanguageConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;
        let cfg = LanguageConfig {
            language_id: raw.language_id,
            script_block: (
                parse_codepoint(&raw.script_block[0])?,
                parse_codepoint(&raw.script_block[1])?,
            ),
            virama: parse_codepoint(&raw.virama)?,
            nukta: raw.nukta.as_deref().map(parse_codepoint).transpose()?,
            inherent_vowel: raw.inherent_vowel,
            consonants: parse_map(raw.consonants)?,
            vowel_signs: parse_map(raw.vowel_signs)?,
            independent_vowels: parse_map(raw.independent_vowels)?,
            schwa_deletion: raw.schwa_deletion,
            nasalization_marks: parse_set(&raw.nasalization_marks)?,
            mark_phones: parse_map(raw.mark_phones)?,
            dead_consonants: parse_set(&raw.dead_consonants)?,
            phones: raw.phones.into_iter().collect(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let (lo, hi) = self.script_block;
        if lo > hi {
            return Err(ConfigError::EmptyBlock(CodePoint(lo), CodePoint(hi)));
        }
        let tables: [(&'static str, Vec<char>); 6] = [
            ("consonants", self.consonants.keys().copied().collect()),
            ("vowel_signs", self.vowel_signs.keys().copied().collect()),
            (
                "independent_vowels",
                self.independent_vowels.keys().copied().collect(),
            ),
            (
                "nasalization_marks",
                self.nasalization_marks.iter().copied().collect(),
            ),
            ("nukta", self.nukta.into_iter().collect()),
            ("virama", vec![self.virama]),
        ];
        let mut seen: BTreeMap<char, &'static str> = BTreeMap::new();
        for (table, cps) in &tables {
            for &cp in cps {
                if !self.in_block(cp) {
                    return Err(ConfigError::OutsideBlock {
                        cp: CodePoint(cp),
                        table,
                    });
                }
                if let Some(first) = seen.insert(cp, table) {
                    if *table == "virama" {
                        return Err(ConfigError::ViramaMapped(CodePoint(cp)));
                    }
                    return Err(ConfigError::Overlap {
                        cp: CodePoint(cp),
                        first,
                        second: table,
                    });
                }
            }
        }
        for &cp in self.mark_phones.keys() {
            if !self.nasalization_marks.contains(&cp) {
                return Err(ConfigError::OutsideBlock {
                    cp: CodePoint(cp),
                    table: "mark_phones (not a declared mark)",
                });
            }
        }
        for &cp in &self.dead_consonants {
            if !self.consonants.contains_key(&cp) {
                return Err(ConfigError::OutsideBlock {
                    cp: CodePoint(cp),
                    table: "dead_consonants (not a declared consonant)",
                });
            }
        }

        let check = |cp: Option<char>, label: &str| -> Result<(), ConfigError> {
            if label.is_empty() {
                return Err(ConfigError::EmptyLabel(CodePoint(cp.unwrap_or(self.virama))));
            }
            if !self.phones.contains(label) {
                return Err(ConfigError::UndeclaredPhone {
                    label: label.to_string(),
                });
            }
            Ok(())
        };
        check(None, &self.inherent_vowel)?;
        for map in [
            &self.consonants,
            &self.vowel_signs,
            &self.independent_vowels,
            &self.mark_phones,
        ] {
            for (&cp, label) in map {
                check(Some(cp), label)?;
            }
        }
        if self.phones.iter().any(String::is_empty) {
            return Err(ConfigError::EmptyLabel(CodePoint(self.virama)));
        }
        Ok(())
    }

    pub fn in_block(&self, c: char) -> bool {
        (self.script_block.0..=self.script_block.1).contains(&c)
    }

    pub fn classify(&self, c: char) -> CharClass {
        if c == ZWJ || c == ZWNJ {
            CharClass::Joiner
        } else if !self.in_block(c) {
            CharClass::Foreign
        } else if c == self.virama {
            CharClass::Virama
        } else if Some(c) == self.nukta {
            CharClass::Nukta
        } else if self.consonants.contains_key(&c) {
            CharClass::Consonant
        } else if self.vowel_signs.contains_key(&c) {
            CharClass::VowelSign
        } else if self.independent_vowels.contains_key(&c) {
            CharClass::IndependentVowel
        } else if self.nasalization_marks.contains(&c) {
            CharClass::Mark
        } else {
            CharClass::Unmapped
        }
    }

    /// Phone of the mapped consonant whose canonical decomposition is
    /// `base` followed by the nukta.
    pub fn nukta_phone(&self, base: char) -> Option<&str> {
        let nukta = self.nukta?;
        self.consonants.iter().find_map(|(&c, phone)| {
            let mut parts = Vec::with_capacity(2);
            unicode_normalization::char::decompose_canonical(c, |p| parts.push(p));
            (parts == [base, nukta]).then_some(phone.as_str())
        })
    }

    /// Every phone the config can emit, in label order.
    pub fn inventory(&self) -> impl Iterator<Item = &str> {
        self.phones.iter().map(String::as_str)
    }
}
