use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Args;
use redaktor_client::{
    sweep_verbalizers, ChatClient, Completer, EndpointConfig, LedgerReplay, Recording, RunLedger,
    SweepResult,
};
use redaktor_core::corpus::{GoldAnnotation, ParallelExample, Task};
use redaktor_core::instruct::{load_registry_file, load_verbalizer_registry};
use redaktor_core::textmetrics::{score_task, MetricValues};
use serde::Serialize;

use crate::commands::score::{check_alignment, load_gold, system_info};
use crate::files::{load_test_corpora, parse_corpus_spec, pretty_json, slug, write_file, CorpusSpec};
use crate::report::{format_cell, render_table, Metadata, ScoreReport, SystemInfo};
use crate::GlobalOpts;

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = crate::parse_task)]
    pub task: Task,
    #[arg(long = "corpus", value_parser = parse_corpus_spec, required = true)]
    pub corpora: Vec<CorpusSpec>,
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// Endpoint TOML (base_url, model_name, api_key_env, max_in_flight, ...).
    #[arg(long, required_unless_present = "replay")]
    pub endpoint: Option<PathBuf>,
    /// Run ledger JSONL; defaults to `<out-dir>/<system>-<task>.runs.jsonl`.
    #[arg(long)]
    pub ledger: Option<PathBuf>,
    /// Answer every prompt from the ledger without contacting the endpoint.
    #[arg(long, requires = "ledger")]
    pub replay: bool,
    /// Verbalizer registry JSON instead of the built-in one.
    #[arg(long)]
    pub registry: Option<PathBuf>,
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long = "type")]
    pub kind: Option<String>,
    #[arg(long)]
    pub size: Option<String>,
}

#[derive(Debug, Serialize)]
struct VerbalizerRow {
    verbalizer_id: String,
    instruction: String,
    score: f64,
    metrics: MetricValues,
    fallbacks: usize,
}

#[derive(Debug, Serialize)]
struct SweepReport {
    metadata: Metadata,
    system: SystemInfo,
    task: Task,
    examples: usize,
    ledger: String,
    replay: bool,
    best_verbalizer_id: String,
    best_score: f64,
    verbalizers: Vec<VerbalizerRow>,
}

fn load_endpoint(path: &PathBuf) -> Result<EndpointConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config: EndpointConfig =
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    config.validate()?;
    Ok(config)
}

async fn sweep<C: Completer>(
    completer: &C,
    task: Task,
    corpus: &[ParallelExample],
    gold: Option<&[GoldAnnotation]>,
    registry: &[redaktor_core::instruct::Verbalizer],
) -> Result<SweepResult> {
    let result = sweep_verbalizers(completer, corpus, registry, task, |outputs| {
        score_task(task, outputs, corpus, gold).map(|s| s.primary())
    })
    .await?;
    Ok(result)
}

pub fn run(global: &GlobalOpts, args: SweepArgs) -> Result<ExitCode> {
    let corpus = load_test_corpora(args.task, &args.corpora)?;
    let gold = load_gold(args.task, args.gold.as_deref())?;
    let sources: Vec<String> = corpus.iter().map(|e| e.source.clone()).collect();
    check_alignment(&corpus, &sources, gold.as_deref())?;
    // Fails early on gold that does not match the sources.
    score_task(args.task, &sources, &corpus, gold.as_deref())?;

    let registry = match &args.registry {
        Some(p) => load_registry_file(p)?,
        None => load_verbalizer_registry(),
    };
    let endpoint = args.endpoint.as_ref().map(load_endpoint).transpose()?;
    let model_name = endpoint.as_ref().map(|e| e.model_name.as_str()).unwrap_or("replay");
    let system = system_info(
        global.config.as_deref(),
        args.system.clone(),
        args.kind.clone(),
        args.size.clone(),
        model_name,
    )?;
    let stem = format!("{}-{}", slug(&system.name), args.task);
    let ledger_path = args
        .ledger
        .clone()
        .unwrap_or_else(|| global.out_dir.join(format!("{stem}.runs.jsonl")));
    if let Some(parent) = ledger_path.parent() {
        std::fs::create_dir_all(parent)?;
    }

    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .context("starting async runtime")?;
    let result = if args.replay {
        let replay = LedgerReplay::load(&ledger_path)?;
        let result =
            runtime.block_on(sweep(&replay, args.task, &corpus, gold.as_deref(), &registry))?;
        if replay.misses() > 0 {
            eprintln!(
                "warning: {} prompts missing from {}; their outputs fall back to the source",
                replay.misses(),
                ledger_path.display()
            );
        }
        result
    } else {
        let Some(endpoint) = endpoint else {
            bail!("--endpoint is required unless --replay is given");
        };
        let client = ChatClient::from_env(endpoint)?;
        let recording = Recording::new(client, RunLedger::open(&ledger_path)?);
        let result =
            runtime.block_on(sweep(&recording, args.task, &corpus, gold.as_deref(), &registry))?;
        if recording.write_failures() > 0 {
            bail!(
                "{} runs could not be written to {}",
                recording.write_failures(),
                ledger_path.display()
            );
        }
        result
    };

    let mut rows = Vec::with_capacity(result.per_verbalizer.len());
    let mut best_score = None;
    for v in &result.per_verbalizer {
        let score = score_task(args.task, &v.run.texts(), &corpus, gold.as_deref())?;
        if v.verbalizer_id == result.best_verbalizer_id {
            best_score = Some(score.clone());
        }
        rows.push(VerbalizerRow {
            verbalizer_id: v.verbalizer_id.clone(),
            instruction: v.instruction.clone(),
            score: v.score,
            metrics: score.aggregate,
            fallbacks: v.fallbacks,
        });
    }
    let best_score = best_score.expect("best verbalizer was scored");
    let metadata = Metadata::now(global.seed);
    let sweep_report = SweepReport {
        metadata: metadata.clone(),
        system: system.clone(),
        task: args.task,
        examples: corpus.len(),
        ledger: ledger_path.display().to_string(),
        replay: args.replay,
        best_verbalizer_id: result.best_verbalizer_id.clone(),
        best_score: result.best_score,
        verbalizers: rows,
    };
    let score_report = ScoreReport::from_task_score(system, &best_score, metadata);
    score_report.validate()?;

    let header: Vec<String> = ["Verbalizer", "Instruction", "Score", "Fallbacks"]
        .map(String::from)
        .to_vec();
    let mut table: Vec<Vec<String>> = sweep_report
        .verbalizers
        .iter()
        .map(|r| {
            vec![
                r.verbalizer_id.clone(),
                r.instruction.clone(),
                format_cell(args.task, &r.metrics),
                r.fallbacks.to_string(),
            ]
        })
        .collect();
    table.push(vec![
        "best".into(),
        sweep_report.best_verbalizer_id.clone(),
        format_cell(args.task, &best_score.aggregate),
        String::new(),
    ]);
    let text = render_table(&header, &table);

    write_file(&global.out_dir.join(format!("{stem}.sweep.json")), &pretty_json(&sweep_report))?;
    write_file(&global.out_dir.join(format!("{stem}.sweep.txt")), &text)?;
    write_file(&global.out_dir.join(format!("{stem}.score.json")), &pretty_json(&score_report))?;
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}
