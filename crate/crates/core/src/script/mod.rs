//! Brahmic-script text analysis: words, aksharas and phones.

mod akshara;
mod config;
mod sentence;

pub use akshara::{phones_of, syllabify, to_phones, tokenize, Akshara, AksharaKind, SegmentError, Tokens};
pub use config::{parse_codepoint, CharClass, CodePoint, ConfigError, LanguageConfig, ZWJ, ZWNJ};
pub use sentence::{analyze_sentence, Mode, RejectReason, Rejection, SentenceRecord};
