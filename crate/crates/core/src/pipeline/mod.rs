//! File-based pipeline stages behind the command-line tool.
//!
//! Every stage reads plain files, writes into an output directory in a
//! fixed order, and records input/output digests in `run_ledger.json` so
//! an unchanged stage is skipped on the next run.

mod commands;
mod config;
mod ledger;

use std::path::PathBuf;

pub use commands::{
    cmd_analyze, cmd_curate, cmd_dmos, cmd_mcd, cmd_mos, cmd_qc, cmd_run, cmd_select, cmd_stats,
    parse_text_lines, Context, StageOutcome,
};
pub use config::{
    CurationSettings, PipelineConfig, SelectionSettings, StatsSettings, ENV_PREFIX,
};
pub use ledger::{sha256_hex, InputDigest, RunLedger, StageEntry, LEDGER_FILE};

use crate::audio::QcError;
use crate::metrics::MetricsError;
use crate::select::SelectError;
use crate::stats::StatsError;

/// Process exit status for success.
pub const EXIT_OK: i32 = 0;
/// A stage ran and failed on its data, or an output could not be written.
pub const EXIT_FAILURE: i32 = 1;
/// Bad arguments, unreadable or invalid config, or a missing input file.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Input {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("sentence id {0:?} occurs more than once")]
    DuplicateId(String),
    #[error("{path}: {source}")]
    Audio {
        path: PathBuf,
        source: MetricsError,
    },
    #[error(transparent)]
    Select(#[from] SelectError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Qc(#[from] QcError),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::Input { .. } => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}
