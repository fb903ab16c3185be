use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Args;
use redaktor_core::corpus::{load_corpus, ParallelExample, Split, Task};
use redaktor_core::instruct::{
    assign_verbalizers, counts_by_task, derive_seed, load_registry_file, load_verbalizer_registry,
    split_train_val, InstructionExample,
};
use serde::{Deserialize, Serialize};

use crate::files::{jsonl, pretty_json, write_file};
use crate::GlobalOpts;

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Build config (same as the global --config).
    #[arg(value_name = "CONFIG")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub task: Task,
    pub dataset: String,
    pub split: Split,
    /// Relative to the config file.
    pub path: PathBuf,
}

/// `expect` keys are task names, `total` or `verbalizers`; values map a
/// split name (or, under `verbalizers`, a task name or `total`) to a count.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildConfig {
    pub seed: Option<u64>,
    /// Verbalizer registry JSON; the built-in registry when absent.
    pub registry: Option<PathBuf>,
    /// Validation examples drawn from each task's pooled train corpora.
    #[serde(default)]
    pub validation: BTreeMap<Task, usize>,
    #[serde(default)]
    pub corpus: Vec<CorpusEntry>,
    #[serde(default)]
    pub expect: BTreeMap<String, BTreeMap<String, usize>>,
}

impl BuildConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading build config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing build config {}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub toolkit_version: String,
    pub seed: u64,
    pub counts: BTreeMap<Task, BTreeMap<Split, usize>>,
    pub totals: BTreeMap<Split, usize>,
    pub verbalizers: BTreeMap<String, usize>,
    pub files: BTreeMap<Split, String>,
}

pub fn split_file(split: Split) -> String {
    format!("{}.jsonl", split.as_str())
}

pub fn run(global: &GlobalOpts, args: BuildArgs) -> Result<ExitCode> {
    let config_path = args
        .config
        .or_else(|| global.config.clone())
        .context("build needs a config file (--config PATH)")?;
    let config = BuildConfig::load(&config_path)?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let seed = global.seed.or(config.seed).unwrap_or(0);

    let registry = match &config.registry {
        Some(p) => load_registry_file(&base.join(p))?,
        None => load_verbalizer_registry(),
    };

    let mut pools: BTreeMap<(Task, Split), Vec<ParallelExample>> = BTreeMap::new();
    for entry in &config.corpus {
        let path = base.join(&entry.path);
        if !path.exists() {
            bail!(
                "corpus {} {} {}: {} does not exist",
                entry.task,
                entry.dataset,
                entry.split.as_str(),
                path.display()
            );
        }
        let examples = load_corpus(&path, entry.task, &entry.dataset, entry.split)?;
        pools.entry((entry.task, entry.split)).or_default().extend(examples);
    }
    for (&task, &count) in &config.validation {
        let train = pools.remove(&(task, Split::Train)).unwrap_or_default();
        let (train, mut held) =
            split_train_val(&train, count, derive_seed(seed, &format!("split/{task}")))
                .with_context(|| format!("splitting {task} train"))?;
        for example in &mut held {
            example.split = Split::Validation;
        }
        pools.insert((task, Split::Train), train);
        pools.entry((task, Split::Validation)).or_default().extend(held);
    }

    let mut by_split: BTreeMap<Split, Vec<InstructionExample>> = BTreeMap::new();
    let mut counts: BTreeMap<Task, BTreeMap<Split, usize>> = BTreeMap::new();
    for ((task, split), examples) in &pools {
        let label = format!("verbalizers/{task}/{}", split.as_str());
        let assigned = assign_verbalizers(examples, &registry, derive_seed(seed, &label))?;
        counts.entry(*task).or_default().insert(*split, assigned.len());
        by_split.entry(*split).or_default().extend(assigned);
    }
    for split_counts in counts.values_mut() {
        for split in Split::ALL {
            split_counts.entry(split).or_insert(0);
        }
    }
    let totals: BTreeMap<Split, usize> = Split::ALL
        .into_iter()
        .map(|s| (s, counts.values().map(|c| c[&s]).sum()))
        .collect();
    let mut verbalizers: BTreeMap<String, usize> = counts_by_task(&registry)
        .into_iter()
        .map(|(t, n)| (t.to_string(), n))
        .collect();
    verbalizers.insert("total".into(), registry.len());

    let mut files = BTreeMap::new();
    for split in Split::ALL {
        let name = split_file(split);
        let examples = by_split.remove(&split).unwrap_or_default();
        write_file(
            &global.out_dir.join(&name),
            &jsonl(examples.iter().map(InstructionExample::to_record)),
        )?;
        files.insert(split, name);
    }
    let manifest = Manifest {
        toolkit_version: env!("CARGO_PKG_VERSION").into(),
        seed,
        counts,
        totals,
        verbalizers,
        files,
    };
    write_file(&global.out_dir.join("manifest.json"), &pretty_json(&manifest))?;

    print!("{}", render_counts(&manifest));
    let failures = check_expectations(&manifest, &config.expect);
    for f in &failures {
        eprintln!("expectation failed: {f}");
    }
    Ok(if failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn render_counts(m: &Manifest) -> String {
    let header: Vec<String> = ["Task", "Train", "Validation", "Test"].map(String::from).to_vec();
    let mut rows: Vec<Vec<String>> = m
        .counts
        .iter()
        .map(|(task, c)| {
            let mut row = vec![crate::report::task_label(*task).to_owned()];
            row.extend(Split::ALL.iter().map(|s| c[s].to_string()));
            row
        })
        .collect();
    let mut total = vec!["Total".to_owned()];
    total.extend(Split::ALL.iter().map(|s| m.totals[s].to_string()));
    rows.push(total);
    crate::report::render_table(&header, &rows)
}

/// Every declared expectation that the manifest does not meet.
pub fn check_expectations(
    manifest: &Manifest,
    expect: &BTreeMap<String, BTreeMap<String, usize>>,
) -> Vec<String> {
    let mut failures = Vec::new();
    for (scope, wanted) in expect {
        for (key, &want) in wanted {
            let got = match scope.as_str() {
                "verbalizers" => manifest.verbalizers.get(key).copied(),
                "total" => key.parse::<Split>().ok().map(|s| manifest.totals[&s]),
                task => match (task.parse::<Task>(), key.parse::<Split>()) {
                    (Ok(t), Ok(s)) => Some(
                        manifest
                            .counts
                            .get(&t)
                            .and_then(|c| c.get(&s))
                            .copied()
                            .unwrap_or(0),
                    ),
                    _ => None,
                },
            };
            match got {
                Some(got) if got == want => {}
                Some(got) => failures.push(format!("{scope}.{key}: expected {want}, got {got}")),
                None => failures.push(format!("{scope}.{key}: not a known count")),
            }
        }
    }
    failures
}
