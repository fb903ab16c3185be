use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use redaktor_core::corpus::{load_corpus, ParallelExample, Split, Task};
use serde::Serialize;

/// `dataset=path` as given on the command line.
#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub dataset: String,
    pub path: PathBuf,
}

pub fn parse_corpus_spec(s: &str) -> Result<CorpusSpec, String> {
    let (dataset, path) = s
        .split_once('=')
        .ok_or_else(|| format!("expected DATASET=PATH, got '{s}'"))?;
    if dataset.is_empty() || path.is_empty() {
        return Err(format!("expected DATASET=PATH, got '{s}'"));
    }
    Ok(CorpusSpec {
        dataset: dataset.to_owned(),
        path: PathBuf::from(path),
    })
}

/// Loads the test corpora in the order given.
pub fn load_test_corpora(task: Task, specs: &[CorpusSpec]) -> Result<Vec<ParallelExample>> {
    if specs.is_empty() {
        bail!("no --corpus given");
    }
    let mut examples = Vec::new();
    for spec in specs {
        examples.extend(load_corpus(&spec.path, task, &spec.dataset, Split::Test)?);
    }
    Ok(examples)
}

/// One output per line. A single trailing newline is allowed.
pub fn read_hypotheses(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading hypotheses {}", path.display()))?;
    let text = text.strip_suffix('\n').unwrap_or(&text);
    if text.is_empty() {
        bail!("hypothesis file {} is empty", path.display());
    }
    Ok(text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l).to_owned())
        .collect())
}

pub fn jsonl<T: Serialize>(items: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(&item).expect("serializable"));
        out.push('\n');
    }
    out
}

pub fn pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    let tmp = path.with_extension("tmp");
    let mut file =
        fs::File::create(&tmp).with_context(|| format!("writing {}", tmp.display()))?;
    file.write_all(contents.as_bytes())?;
    file.sync_all()?;
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn slug(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '.' || c == '-' { c.to_ascii_lowercase() } else { '-' })
        .collect();
    let s = s.trim_matches('-').to_owned();
    if s.is_empty() { "system".into() } else { s }
}
