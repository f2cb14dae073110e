//! `unitforge` command-line tool.
//!
//! Exit codes: 0 on success, 1 for usage and validation errors, 2 for runtime failures.
//! Data and reports go to files; logs (including the effective seed) go to standard error.

mod commands;
mod files;

use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use unitforge::bleu::Smoothing;
use unitforge::mine::{Direction, Margin, Side};
use unitforge::{ManifestFormat, TokenizerTag};

/// Corpus engineering for unit-based speech-to-speech translation.
#[derive(Debug, Parser)]
#[command(name = "unitforge", version, propagate_version = true)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads. Outputs do not depend on this value.
    #[arg(long, global = true)]
    threads: Option<NonZeroUsize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit k-means codebooks and assign frames to units.
    #[command(subcommand)]
    Quantize(QuantizeCmd),
    /// Post-process unit sequences.
    #[command(subcommand)]
    Units(UnitsCmd),
    /// Pool and normalize embeddings.
    #[command(subcommand)]
    Embed(EmbedCmd),
    /// Margin-based mining; without a subcommand, runs the miner.
    Mine(MineArgs),
    /// Temperature-balanced language sampling.
    Balance(BalanceArgs),
    /// Corpus BLEU of a hypothesis file against a reference file.
    Bleu(BleuArgs),
    /// Transcribe generated audio with an ASR adapter and score it.
    AsrBleu(AsrBleuArgs),
    /// Pseudo-labeling cascades.
    #[command(subcommand)]
    Cascade(CascadeCmd),
    /// Manifest statistics and format conversion.
    #[command(subcommand)]
    Manifest(ManifestCmd),
}

#[derive(Debug, Subcommand)]
enum QuantizeCmd {
    /// Fit a k-means codebook (written as EMB1 plus a `.meta.jsonl` sidecar).
    Fit {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 100)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Assign every frame to its nearest centroid.
    Assign {
        #[arg(long)]
        codebook: PathBuf,
        #[arg(long)]
        features: PathBuf,
        /// `id<TAB>frames` table splitting the rows into utterances.
        #[arg(long)]
        lengths: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum UnitsCmd {
    /// Remove consecutive duplicate units.
    Dedup {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        vocab_size: Option<u32>,
    },
    /// Collapse repeats, then drop the blank unit.
    CtcCollapse {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        blank: u32,
        #[arg(long)]
        vocab_size: Option<u32>,
    },
}

#[derive(Debug, Subcommand)]
enum EmbedCmd {
    /// Max-pool frame embeddings into one row per utterance.
    Pool {
        #[arg(long)]
        frames: PathBuf,
        #[arg(long)]
        lengths: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Scale every row to unit L2 norm.
    Normalize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct MineArgs {
    #[command(subcommand)]
    command: Option<MineCmd>,
    #[command(flatten)]
    run: MineRunArgs,
}

#[derive(Debug, Subcommand)]
enum MineCmd {
    /// Mine pairs (same as `mine` without a subcommand).
    Run(MineRunArgs),
    /// Greedy removal of pairs whose segments overlap kept ones too much.
    FilterOverlap {
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.2)]
        max_overlap: f64,
        #[arg(long, default_value = "src")]
        side: Side,
        #[arg(long)]
        src_segments: Option<PathBuf>,
        #[arg(long)]
        tgt_segments: Option<PathBuf>,
    },
    /// Similarity-search error rate of audio against text embeddings.
    SimsearchEval {
        #[arg(long)]
        audio: PathBuf,
        #[arg(long)]
        text: PathBuf,
        /// `audio_id<TAB>text_id` table.
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4)]
        knn: usize,
        #[arg(long, default_value = "ratio")]
        margin: Margin,
    },
}

#[derive(Debug, Args)]
struct MineRunArgs {
    #[arg(long, required = true)]
    src: Option<PathBuf>,
    #[arg(long, required = true)]
    tgt: Option<PathBuf>,
    #[arg(long, required = true)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    knn: usize,
    /// Minimum margin score; omitted means no threshold.
    #[arg(long, allow_negative_numbers = true)]
    threshold: Option<f64>,
    #[arg(long, default_value = "forward")]
    direction: Direction,
    #[arg(long, default_value = "ratio")]
    margin: Margin,
    /// Use the rows as stored instead of L2-normalizing them first.
    #[arg(long)]
    no_normalize: bool,
    #[arg(long)]
    src_segments: Option<PathBuf>,
    #[arg(long)]
    tgt_segments: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BalanceArgs {
    /// `lang<TAB>amount` table.
    #[arg(long)]
    counts: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    temperature: f64,
    #[arg(long, default_value = "dist.json")]
    out: PathBuf,
    /// Also draw a sampling schedule of utterance ids into this file.
    #[arg(long, requires_all = ["pools", "total"])]
    schedule_out: Option<PathBuf>,
    /// Manifest whose records form the per-language pools.
    #[arg(long)]
    pools: Option<PathBuf>,
    #[arg(long)]
    total: Option<usize>,
}

#[derive(Debug, Args)]
struct BleuArgs {
    #[arg(long)]
    hyp: PathBuf,
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long, default_value = "word13a")]
    tokenizer: TokenizerTag,
    #[arg(long, default_value = "none")]
    smooth: Smoothing,
    #[arg(long, default_value = "bleu.json")]
    out: PathBuf,
    /// Print the report to standard output instead of writing `--out`.
    #[arg(long)]
    stdout: bool,
}

#[derive(Debug, Args)]
struct AsrBleuArgs {
    /// Manifest of generated audio.
    #[arg(long)]
    manifest: PathBuf,
    /// Manifest holding reference texts.
    #[arg(long = "ref")]
    reference: PathBuf,
    /// ASR adapter URI (`mock:...` or `exec:...`).
    #[arg(long)]
    asr: String,
    #[arg(long, default_value = "tailo_syllable")]
    tokenizer: TokenizerTag,
    #[arg(long, default_value = "none")]
    smooth: Smoothing,
    #[arg(long, default_value = "asr_bleu.json")]
    out: PathBuf,
    #[arg(long)]
    stdout: bool,
}

#[derive(Debug, Subcommand)]
enum CascadeCmd {
    /// Run a pipeline spec over a manifest.
    Run {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "cascade_report.json")]
        report: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum ManifestCmd {
    /// Per-language counts, hours and speakers.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "stats.json")]
        out: PathBuf,
        #[arg(long)]
        stdout: bool,
    },
    /// Convert between TSV and JSONL (formats default to the file extensions).
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        from: Option<ManifestFormat>,
        #[arg(long)]
        to: Option<ManifestFormat>,
    },
}

/// A usage or validation problem, reported with exit code 1.
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    log::info!("effective seed: {}", cli.seed);

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(n.get());
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            log::error!("cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| commands::run(cli.command, cli.seed)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = if e.downcast_ref::<Invalid>().is_some() { 1 } else { 2 };
            log::error!("{e:#}");
            ExitCode::from(code)
        }
    }
}
