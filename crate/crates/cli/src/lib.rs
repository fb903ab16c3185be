//! `redaktor`: build instruction datasets, score system outputs, sweep
//! verbalizers against chat endpoints, cut ablation mixtures and render
//! result tables.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use redaktor_core::corpus::Task;

mod commands;
mod files;
pub mod report;

pub use commands::build::{BuildConfig, Manifest};

#[derive(Debug, Parser)]
#[command(name = "redaktor", version, about = "Ukrainian text-editing experiment toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Base seed; overrides any seed in the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Build config for `build`; system metadata for `score`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    /// Worker threads for scoring (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the instruction dataset from task corpora.
    Build(commands::build::BuildArgs),
    /// Score system outputs on a task's test corpora.
    Score(commands::score::ScoreArgs),
    /// Run every verbalizer of a task against an endpoint and keep the best.
    Sweep(commands::sweep::SweepArgs),
    /// Write a training mixture with one task held out.
    Ablate(commands::ablate::AblateArgs),
    /// Merge score reports into result tables.
    Report(commands::report::ReportArgs),
}

pub(crate) fn parse_task(s: &str) -> Result<Task, String> {
    s.parse::<Task>().map_err(|e| e.to_string())
}

pub fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if let Some(jobs) = cli.global.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .context("configuring worker threads")?;
    }
    match cli.command {
        Command::Build(args) => commands::build::run(&cli.global, args),
        Command::Score(args) => commands::score::run(&cli.global, args),
        Command::Sweep(args) => commands::sweep::run(&cli.global, args),
        Command::Ablate(args) => commands::ablate::run(&cli.global, args),
        Command::Report(args) => commands::report::run(&cli.global, args),
    }
}
