use std::path::Path;

use serde::Deserialize;

use super::normalize;
use super::task::{ParallelExample, Split, Task};
use crate::error::{Error, Result};

#[derive(Deserialize)]
struct JsonRecord {
    id: Option<String>,
    src: String,
    refs: Vec<String>,
}

fn lines_of(bytes: &[u8]) -> Vec<&[u8]> {
    let mut lines: Vec<&[u8]> = bytes
        .split(|&b| b == b'\n')
        .map(|l| l.strip_suffix(b"\r").unwrap_or(l))
        .collect();
    while lines.last().is_some_and(|l| l.iter().all(u8::is_ascii_whitespace)) {
        lines.pop();
    }
    lines
}

/// Parses JSONL (`{"id"?, "src", "refs"}`) or TSV (`source<TAB>reference`)
/// corpus content. The format is chosen by the first line.
pub fn parse_corpus(
    bytes: &[u8],
    task: Task,
    dataset: &str,
    split: Split,
) -> Result<Vec<ParallelExample>> {
    if !task.allows_dataset(dataset) {
        return Err(Error::Config(format!(
            "dataset '{dataset}' does not belong to task {task}"
        )));
    }
    let lines = lines_of(bytes);
    let jsonl = lines
        .first()
        .is_some_and(|l| l.trim_ascii_start().starts_with(b"{"));

    let mut examples = Vec::with_capacity(lines.len());
    for (idx, raw) in lines.into_iter().enumerate() {
        let line_no = idx + 1;
        let line = std::str::from_utf8(raw)
            .map_err(|e| Error::parse(line_no, format!("invalid UTF-8: {e}")))?;
        if line.trim().is_empty() {
            return Err(Error::parse(line_no, "empty line"));
        }
        let (id, source, references) = if jsonl {
            let record: JsonRecord = serde_json::from_str(line)
                .map_err(|e| Error::parse(line_no, format!("bad record: {e}")))?;
            (record.id, record.src, record.refs)
        } else {
            let mut columns = line.split('\t');
            let source = columns.next().unwrap_or_default().to_owned();
            let refs: Vec<String> = columns.map(str::to_owned).collect();
            if refs.is_empty() {
                return Err(Error::parse(line_no, "expected source<TAB>reference"));
            }
            (None, source, refs)
        };

        let example = ParallelExample {
            id: id
                .map(|i| normalize(&i))
                .unwrap_or_else(|| format!("{dataset}:{line_no}")),
            task,
            dataset: dataset.to_owned(),
            split,
            source: normalize(&source),
            references: references.iter().map(|r| normalize(r)).collect(),
        };
        example
            .validate()
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
        examples.push(example);
    }
    Ok(examples)
}

/// Reads a parallel corpus file. Line order is preserved and every example
/// is NFC-normalized.
pub fn load_corpus(
    path: &Path,
    task: Task,
    dataset: &str,
    split: Split,
) -> Result<Vec<ParallelExample>> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_corpus(&bytes, task, dataset, split).map_err(|e| match e {
        Error::Parse { line, message } => Error::Load {
            path: path.to_owned(),
            line,
            message,
        },
        other => other,
    })
}
