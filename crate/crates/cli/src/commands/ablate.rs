use std::collections::BTreeMap;
use std::io::{BufRead, BufReader};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Args;
use redaktor_core::corpus::Task;
use redaktor_core::instruct::{build_ablation_mixture, InstructionExample, InstructionRecord};
use serde::Serialize;

use crate::files::{jsonl, pretty_json, write_file};
use crate::GlobalOpts;

#[derive(Debug, Args)]
pub struct AblateArgs {
    /// Training JSONL written by `build`.
    #[arg(long)]
    pub full: PathBuf,
    #[arg(long, value_parser = crate::parse_task)]
    pub held_out: Task,
}

#[derive(Debug, Serialize)]
struct MixtureManifest {
    toolkit_version: String,
    name: String,
    held_out: Task,
    seed: u64,
    source: String,
    included_tasks: Vec<Task>,
    counts: BTreeMap<Task, usize>,
    total: usize,
}

pub fn read_instruction_file(path: &PathBuf) -> Result<Vec<InstructionExample>> {
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut examples = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("{}:{}", path.display(), i + 1))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: InstructionRecord = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}", path.display(), i + 1))?;
        examples.push(
            InstructionExample::from_record(record, i + 1)
                .with_context(|| format!("{}:{}", path.display(), i + 1))?,
        );
    }
    Ok(examples)
}

pub fn run(global: &GlobalOpts, args: AblateArgs) -> Result<ExitCode> {
    let full = read_instruction_file(&args.full)?;
    let seed = global.seed.unwrap_or(0);
    let mixture = build_ablation_mixture(&full, args.held_out, seed);
    let dir = global.out_dir.join(&mixture.name);
    write_file(
        &dir.join("train.jsonl"),
        &jsonl(mixture.examples.iter().map(InstructionExample::to_record)),
    )?;
    let counts = mixture.counts_by_task();
    let manifest = MixtureManifest {
        toolkit_version: env!("CARGO_PKG_VERSION").into(),
        name: mixture.name.clone(),
        held_out: args.held_out,
        seed,
        source: args.full.display().to_string(),
        included_tasks: mixture.included_tasks.iter().copied().collect(),
        total: mixture.examples.len(),
        counts,
    };
    write_file(&dir.join("manifest.json"), &pretty_json(&manifest))?;
    println!("{}: {} training examples", mixture.name, manifest.total);
    Ok(ExitCode::SUCCESS)
}
