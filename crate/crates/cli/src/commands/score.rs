use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Args;
use redaktor_core::corpus::{parse_m2, GoldAnnotation, ParallelExample, Task};
use redaktor_core::gecscore::{score_gec_corpus, DEFAULT_BETA};
use redaktor_core::textmetrics::score_task;
use serde::Deserialize;

use crate::files::{
    jsonl, load_test_corpora, parse_corpus_spec, pretty_json, read_hypotheses, slug, write_file,
    CorpusSpec,
};
use crate::report::{render_report, task_score_table, Metadata, ScoreReport, SystemInfo};
use crate::GlobalOpts;

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long, value_parser = crate::parse_task)]
    pub task: Task,
    /// Test corpus as DATASET=PATH; repeat for several datasets. Hypotheses
    /// follow the corpora in the order given.
    #[arg(long = "corpus", value_parser = parse_corpus_spec, required = true)]
    pub corpora: Vec<CorpusSpec>,
    /// System outputs, one per line.
    #[arg(long, conflicts_with = "copy", required_unless_present = "copy")]
    pub hyp: Option<PathBuf>,
    /// Score the sources themselves.
    #[arg(long)]
    pub copy: bool,
    /// Gold M2 annotations (GEC only), aligned with the corpus.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long = "type")]
    pub kind: Option<String>,
    #[arg(long)]
    pub size: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    #[serde(default)]
    system: Option<SystemSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemSection {
    name: Option<String>,
    #[serde(rename = "type")]
    kind: Option<String>,
    size: Option<String>,
}

/// Command-line values win over the `[system]` section of `--config`.
pub(crate) fn system_info(
    config: Option<&Path>,
    name: Option<String>,
    kind: Option<String>,
    size: Option<String>,
    default_name: &str,
) -> Result<SystemInfo> {
    let section = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let file: SystemFile =
                toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            file.system.unwrap_or_default()
        }
        None => SystemSection::default(),
    };
    let defaults = SystemInfo::default();
    Ok(SystemInfo {
        name: name.or(section.name).unwrap_or_else(|| default_name.to_owned()),
        kind: kind.or(section.kind).unwrap_or(defaults.kind),
        size: size.or(section.size).unwrap_or(defaults.size),
    })
}

pub(crate) fn load_gold(task: Task, gold: Option<&Path>) -> Result<Option<Vec<GoldAnnotation>>> {
    match (task, gold) {
        (Task::Gec, None) => bail!("GEC scoring needs --gold"),
        (Task::Gec, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let gold = parse_m2(&text).with_context(|| format!("parsing {}", path.display()))?;
            Ok(Some(gold))
        }
        (_, Some(_)) => bail!("--gold only applies to GEC"),
        (_, None) => Ok(None),
    }
}

pub(crate) fn check_alignment(
    corpus: &[ParallelExample],
    outputs: &[String],
    gold: Option<&[GoldAnnotation]>,
) -> Result<()> {
    if outputs.len() != corpus.len() {
        let index = outputs.len().min(corpus.len());
        bail!(
            "{} hypotheses for {} test examples (first unaligned sentence index {index})",
            outputs.len(),
            corpus.len()
        );
    }
    if let Some(gold) = gold {
        if gold.len() != corpus.len() {
            bail!(
                "{} gold annotations for {} test examples (first unaligned sentence index {})",
                gold.len(),
                corpus.len(),
                gold.len().min(corpus.len())
            );
        }
    }
    Ok(())
}

pub fn run(global: &GlobalOpts, args: ScoreArgs) -> Result<ExitCode> {
    let corpus = load_test_corpora(args.task, &args.corpora)?;
    let outputs = match &args.hyp {
        Some(path) => read_hypotheses(path)?,
        None => corpus.iter().map(|e| e.source.clone()).collect(),
    };
    let gold = load_gold(args.task, args.gold.as_deref())?;
    check_alignment(&corpus, &outputs, gold.as_deref())?;
    let default_name = if args.copy { "Copy" } else { "system" };
    let system = system_info(
        global.config.as_deref(),
        args.system,
        args.kind,
        args.size,
        default_name,
    )?;

    let score = score_task(args.task, &outputs, &corpus, gold.as_deref())?;
    let diagnostics = match &gold {
        Some(gold) => {
            let sources: Vec<String> = corpus.iter().map(|e| e.source.clone()).collect();
            let report = score_gec_corpus(&sources, &outputs, gold, DEFAULT_BETA)?;
            Some(jsonl(report.diagnostics()))
        }
        None => None,
    };
    let report = ScoreReport::from_task_score(system.clone(), &score, Metadata::now(global.seed));
    report.validate()?;

    let stem = format!("{}-{}", slug(&system.name), args.task);
    let text = format!("{}\n{}", render_report(&report), task_score_table(&score));
    write_file(&global.out_dir.join(format!("{stem}.score.json")), &pretty_json(&report))?;
    write_file(&global.out_dir.join(format!("{stem}.score.txt")), &text)?;
    if let Some(diag) = diagnostics {
        write_file(&global.out_dir.join(format!("{stem}.diagnostics.jsonl")), &diag)?;
    }
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}
