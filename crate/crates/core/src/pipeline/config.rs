use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::audio::QcThresholds;
use crate::metrics::CepstrumConfig;
use crate::script::{LanguageConfig, Mode};
use crate::select::{AugmentationPolicy, SelectionConstraints, StopCriterion};

/// Prefix of environment variables that override config keys, e.g.
/// `TTSDK_QC_CLIP_LEVEL` or `TTSDK_LANGUAGE`.
pub const ENV_PREFIX: &str = "TTSDK_";

const SECTIONS: [&str; 7] = [
    "constraints",
    "selection",
    "augmentation",
    "stats",
    "curation",
    "qc",
    "metrics",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionSettings {
    /// Maximum number of greedy picks; takes precedence over the target.
    pub budget: Option<usize>,
    pub target_coverage: f64,
}

impl Default for SelectionSettings {
    fn default() -> Self {
        Self {
            budget: None,
            target_coverage: 1.0,
        }
    }
}

impl SelectionSettings {
    pub fn stop(&self) -> StopCriterion {
        match self.budget {
            Some(b) => StopCriterion::Budget(b),
            None => StopCriterion::TargetCoverage(self.target_coverage),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsSettings {
    pub zipf_min_count: u64,
}

impl Default for StatsSettings {
    fn default() -> Self {
        Self { zipf_min_count: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurationSettings {
    /// Two-column `token<TAB>expansion` file.
    pub lexicon: Option<PathBuf>,
    /// One keyword per line.
    pub keywords: Option<PathBuf>,
    pub max_syllables_per_word: usize,
    /// Words seen fewer times than this in the input are flagged.
    pub uncommon_min_count: Option<u64>,
}

impl Default for CurationSettings {
    fn default() -> Self {
        Self {
            lexicon: None,
            keywords: None,
            max_syllables_per_word: 5,
            uncommon_min_count: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Language definition file.
    pub language: Option<PathBuf>,
    pub strict: bool,
    /// Reserved; every stage is deterministic.
    pub seed: u64,
    pub constraints: SelectionConstraints,
    pub selection: SelectionSettings,
    pub augmentation: AugmentationPolicy,
    pub stats: StatsSettings,
    pub curation: CurationSettings,
    pub qc: QcThresholds,
    pub metrics: CepstrumConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            language: None,
            strict: true,
            seed: 0,
            constraints: SelectionConstraints::default(),
            selection: SelectionSettings::default(),
            augmentation: AugmentationPolicy::default(),
            stats: StatsSettings::default(),
            curation: CurationSettings::default(),
            qc: QcThresholds::default(),
            metrics: CepstrumConfig::default(),
        }
    }
}

fn config_err(msg: impl Into<String>) -> PipelineError {
    PipelineError::Config(msg.into())
}

/// Parses an override value as a TOML literal, falling back to a string.
fn parse_override(raw: &str, current: Option<&toml::Value>) -> toml::Value {
    if matches!(current, Some(toml::Value::String(_))) {
        return toml::Value::String(raw.to_string());
    }
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Splits `TTSDK_QC_CLIP_LEVEL` into `("qc", "clip_level")`; top-level keys
/// have an empty section.
fn split_env_key(name: &str) -> Option<(&'static str, String)> {
    let rest = name.strip_prefix(ENV_PREFIX)?.to_ascii_lowercase();
    for section in SECTIONS {
        if let Some(key) = rest.strip_prefix(section).and_then(|r| r.strip_prefix('_')) {
            if !key.is_empty() {
                return Some((section, key.to_string()));
            }
        }
    }
    Some(("", rest))
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        self.constraints
            .validate()
            .map_err(|e| config_err(e.to_string()))?;
        self.augmentation
            .validate()
            .map_err(|e| config_err(e.to_string()))?;
        if !(0.0..=1.0).contains(&self.selection.target_coverage) {
            return Err(config_err(format!(
                "selection.target_coverage {} outside [0, 1]",
                self.selection.target_coverage
            )));
        }
        self.qc.validate().map_err(|e| config_err(e.to_string()))?;
        self.metrics
            .validate()
            .map_err(|e| config_err(e.to_string()))?;
        Ok(())
    }

    /// Parses `text`, applies `TTSDK_*` overrides from `env`, resolves
    /// relative paths against `base` and validates.
    pub fn from_toml_with_env<I>(text: &str, base: &Path, env: I) -> Result<Self, PipelineError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| config_err(format!("invalid config: {e}")))?;
        let mut overrides: Vec<(String, String)> = env
            .into_iter()
            .filter(|(k, _)| k.starts_with(ENV_PREFIX))
            .collect();
        overrides.sort();
        for (name, raw) in overrides {
            let Some((section, key)) = split_env_key(&name) else {
                continue;
            };
            let target = if section.is_empty() {
                &mut table
            } else {
                table
                    .entry(section)
                    .or_insert_with(|| toml::Value::Table(toml::Table::new()))
                    .as_table_mut()
                    .ok_or_else(|| config_err(format!("[{section}] is not a table")))?
            };
            let value = parse_override(&raw, target.get(&key));
            target.insert(key, value);
        }
        let mut cfg: PipelineConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| config_err(format!("invalid config: {e}")))?;
        for p in [
            &mut cfg.language,
            &mut cfg.curation.lexicon,
            &mut cfg.curation.keywords,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file with process-environment overrides.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_with_env(&text, base, std::env::vars())
    }

    /// Defaults with process-environment overrides, for runs without a file.
    pub fn from_env() -> Result<Self, PipelineError> {
        Self::from_toml_with_env("", Path::new("."), std::env::vars())
    }

    pub fn mode(&self) -> Mode {
        if self.strict {
            Mode::Strict
        } else {
            Mode::Lenient
        }
    }

    pub fn load_language(&self) -> Result<LanguageConfig, PipelineError> {
        let path = self
            .language
            .as_ref()
            .ok_or_else(|| config_err("no language file configured"))?;
        LanguageConfig::load(path).map_err(|e| config_err(format!("{}: {e}", path.display())))
    }
}
