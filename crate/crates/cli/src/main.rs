//! `trelkit`: build pools, judge them, and score systems against the result.
//!
//! Exit status is 0 on success, 1 when an audit raises flags, and 2 on any
//! usage or validation error.

mod audit;
mod evaluate;
mod input;
mod output;
mod pool;
mod reliability;
mod serve;
mod stats;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "trelkit", version, about = "Test-collection construction and evaluation")]
struct Cli {
    /// Seed for noise sampling and presentation order. Required by `pool`
    /// and `reliability`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file, or directory for `pool`, `export` and `synth`. Defaults
    /// to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Global<'a> {
    pub seed: Option<u64>,
    pub out: Option<&'a std::path::Path>,
    pub format: Format,
}

impl Global<'_> {
    pub fn require_seed(&self) -> anyhow::Result<u64> {
        self.seed.ok_or_else(|| anyhow::anyhow!("--seed is required for pooling commands"))
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build size-k pools for every topic.
    Pool(pool::PoolArgs),
    /// Score runs against qrels and rank the systems.
    Evaluate(evaluate::EvaluateArgs),
    /// Measure how scores move as pools grow.
    Reliability(reliability::ReliabilityArgs),
    /// Check how often assessors found noise documents relevant.
    Audit(audit::AuditArgs),
    /// Size and length statistics of the crawled collection.
    Stats(stats::StatsArgs),
    /// Run the judging service.
    Serve(serve::ServeArgs),
    /// Write per-assessor qrels from a judgment log.
    Export(serve::ExportArgs),
    /// Write a synthetic collection with planted relevance.
    Synth(synth::SynthArgs),
}

/// Inputs shared by `pool` and `reliability`.
#[derive(Debug, Clone, Args)]
pub struct PoolingSources {
    /// Topics XML file.
    #[arg(long)]
    pub topics: PathBuf,
    /// Crawl manifest (`doc<TAB>path<TAB>topic,topic`).
    #[arg(long)]
    pub manifest: PathBuf,
    /// Run files of the pooling systems. Directories contribute every file
    /// inside them.
    #[arg(long = "runs", num_args = 1.., required = true)]
    pub runs: Vec<PathBuf>,
    /// Run file holding the web search engine's ranking per topic.
    #[arg(long)]
    pub google: PathBuf,
    /// Documents taken from the top of the search engine ranking.
    #[arg(long = "k-g", default_value_t = 10)]
    pub k_g: usize,
    /// Documents sampled from the noise topics' downloads.
    #[arg(long = "k-n", default_value_t = 10)]
    pub k_n: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let global = Global { seed: cli.seed, out: cli.out.as_deref(), format: cli.format };
    let result = match &cli.command {
        Command::Pool(a) => pool::run(a, &global),
        Command::Evaluate(a) => evaluate::run(a, &global),
        Command::Reliability(a) => reliability::run(a, &global),
        Command::Audit(a) => audit::run(a, &global),
        Command::Stats(a) => stats::run(a, &global),
        Command::Serve(a) => serve::serve(a, &global),
        Command::Export(a) => serve::export(a, &global),
        Command::Synth(a) => synth::run(a, &global),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
