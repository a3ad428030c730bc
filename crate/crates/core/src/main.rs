use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tts_datakit::pipeline::{
    cmd_analyze, cmd_curate, cmd_dmos, cmd_mcd, cmd_mos, cmd_qc, cmd_run, cmd_select, cmd_stats,
    Context, PipelineConfig, PipelineError, StageOutcome, EXIT_USAGE,
};

/// Recording-script selection, curation, audio QC and evaluation metrics
/// for speech corpora.
///
/// Exit status: 0 success, 1 a stage failed on its data or could not write
/// output, 2 usage error, bad config or missing input. Every config key can
/// be overridden with TTSDK_<SECTION>_<KEY>, e.g. TTSDK_QC_CLIP_LEVEL=0.99.
#[derive(Parser)]
#[command(name = "tts-datakit", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Pipeline config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Reject sentences and recordings that deviate from the config.
    #[arg(long, global = true, conflicts_with = "lenient")]
    strict: bool,
    /// Drop unknown characters with a warning; format mismatches only warn.
    #[arg(long, global = true)]
    lenient: bool,
    /// Directory for outputs and the run ledger.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Re-run stages even if their inputs are unchanged.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Raw text (one sentence per line, optionally `id<TAB>text`) to analyzed records.
    Analyze { input: PathBuf },
    /// Syllable and phone frequency tables, Zipf fit and weak phones.
    Stats { analyzed: PathBuf },
    /// Filter, greedy coverage selection and weak-phone augmentation.
    Select { analyzed: PathBuf },
    /// Punctuation cleanup and review flags for `id<TAB>text` lines.
    Curate { input: PathBuf },
    /// Check recordings listed as `utt_id<TAB>wav<TAB>text`.
    Qc { manifest: PathBuf },
    /// Mel-cepstral distortion over `ref.wav<TAB>syn.wav[<TAB>system]` pairs.
    Mcd { pairs: PathBuf },
    /// MOS per system from `evaluator,system,item,condition,score` ratings.
    Mos { ratings: PathBuf },
    /// Ground-truth-normalized MOS per system.
    Dmos { ratings: PathBuf },
    /// analyze, stats, select and curate in sequence, then qc if a manifest is given.
    Run {
        input: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
}

fn context(g: &Global) -> Result<Context, PipelineError> {
    let mut cfg = match &g.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::from_env()?,
    };
    if g.strict {
        cfg.strict = true;
    }
    if g.lenient {
        cfg.strict = false;
    }
    Ok(Context {
        cfg,
        out_dir: g.out_dir.clone(),
        force: g.force,
    })
}

fn execute(cli: &Cli) -> Result<Vec<StageOutcome>, PipelineError> {
    let ctx = context(&cli.global)?;
    let one = |r: Result<StageOutcome, PipelineError>| r.map(|o| vec![o]);
    match &cli.command {
        Command::Analyze { input } => one(cmd_analyze(&ctx, input)),
        Command::Stats { analyzed } => one(cmd_stats(&ctx, analyzed)),
        Command::Select { analyzed } => one(cmd_select(&ctx, analyzed)),
        Command::Curate { input } => one(cmd_curate(&ctx, input)),
        Command::Qc { manifest } => one(cmd_qc(&ctx, manifest)),
        Command::Mcd { pairs } => one(cmd_mcd(&ctx, pairs)),
        Command::Mos { ratings } => one(cmd_mos(&ctx, ratings)),
        Command::Dmos { ratings } => one(cmd_dmos(&ctx, ratings)),
        Command::Run { input, manifest } => cmd_run(&ctx, input, manifest.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.global.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(EXIT_USAGE as u8);
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(outcomes) => {
            for o in outcomes {
                if o.skipped {
                    println!("{}: skipped, inputs unchanged", o.stage);
                } else if o.summary.contains('\n') {
                    println!("{}:\n{}", o.stage, o.summary);
                } else {
                    println!("{}: {}", o.stage, o.summary);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
