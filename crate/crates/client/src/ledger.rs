use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::protocol::Completer;
use crate::ClientError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Filtered,
    Error,
    Timeout,
}

/// Outcome of one prompt. `response_text` is present exactly when the
/// status is `Ok`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub example_id: String,
    pub prompt: String,
    pub response_text: Option<String>,
    pub status: RunStatus,
    pub latency_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl RunRecord {
    pub fn ok(example_id: &str, prompt: &str, text: String, latency_ms: u64) -> Self {
        RunRecord {
            example_id: example_id.to_owned(),
            prompt: prompt.to_owned(),
            response_text: Some(text),
            status: RunStatus::Ok,
            latency_ms,
            detail: None,
        }
    }

    /// A record without a response. Panics if `status` is `Ok`.
    pub fn failed(
        example_id: &str,
        prompt: &str,
        status: RunStatus,
        latency_ms: u64,
        detail: impl Into<String>,
    ) -> Self {
        assert!(status != RunStatus::Ok, "failed record with ok status");
        RunRecord {
            example_id: example_id.to_owned(),
            prompt: prompt.to_owned(),
            response_text: None,
            status,
            latency_ms,
            detail: Some(detail.into()),
        }
    }

    pub fn is_consistent(&self) -> bool {
        (self.status == RunStatus::Ok) == self.response_text.is_some()
    }

    /// The model output, or `fallback` when there is none.
    pub fn output_or<'a>(&'a self, fallback: &'a str) -> &'a str {
        match (&self.status, &self.response_text) {
            (RunStatus::Ok, Some(text)) => text,
            _ => fallback,
        }
    }
}

type Key = (String, String);

fn read_records(path: &Path) -> Result<Vec<RunRecord>, ClientError> {
    let err = |message: String| ClientError::Ledger {
        path: path.display().to_string(),
        message,
    };
    let file = File::open(path).map_err(|e| err(e.to_string()))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| err(format!("line {}: {e}", i + 1)))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RunRecord =
            serde_json::from_str(&line).map_err(|e| err(format!("line {}: {e}", i + 1)))?;
        if !record.is_consistent() {
            return Err(err(format!(
                "line {}: status {:?} disagrees with response presence",
                i + 1,
                record.status
            )));
        }
        records.push(record);
    }
    Ok(records)
}

fn index(records: Vec<RunRecord>) -> HashMap<Key, RunRecord> {
    records
        .into_iter()
        .map(|r| ((r.example_id.clone(), r.prompt.clone()), r))
        .collect()
}

/// Append-only JSONL file of run records.
#[derive(Debug)]
pub struct RunLedger {
    path: PathBuf,
    writer: Mutex<File>,
    previous: HashMap<Key, RunRecord>,
}

impl RunLedger {
    /// Opens `path` for appending, creating it if needed. Records already in
    /// the file are indexed by (example id, prompt); later lines win.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, ClientError> {
        let path = path.as_ref().to_path_buf();
        let previous = if path.exists() {
            index(read_records(&path)?)
        } else {
            HashMap::new()
        };
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| ClientError::Ledger {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
        Ok(RunLedger {
            path,
            writer: Mutex::new(file),
            previous,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn previous(&self, example_id: &str, prompt: &str) -> Option<&RunRecord> {
        self.previous
            .get(&(example_id.to_owned(), prompt.to_owned()))
    }

    pub fn append(&self, record: &RunRecord) -> Result<(), ClientError> {
        let mut line = serde_json::to_string(record).expect("run record serializes");
        line.push('\n');
        let mut file = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        file.write_all(line.as_bytes())
            .and_then(|_| file.flush())
            .map_err(|e| ClientError::Ledger {
                path: self.path.display().to_string(),
                message: e.to_string(),
            })
    }
}

/// Wraps a completer so every record is appended to a ledger before it is
/// returned. Ok and filtered records already in the ledger are reused, so an
/// interrupted sweep resumes where it stopped; errors and timeouts are retried.
pub struct Recording<C> {
    inner: C,
    ledger: RunLedger,
    reused: AtomicUsize,
    write_failures: AtomicUsize,
}

impl<C> Recording<C> {
    pub fn new(inner: C, ledger: RunLedger) -> Self {
        Recording {
            inner,
            ledger,
            reused: AtomicUsize::new(0),
            write_failures: AtomicUsize::new(0),
        }
    }

    pub fn reused(&self) -> usize {
        self.reused.load(Ordering::Relaxed)
    }

    pub fn write_failures(&self) -> usize {
        self.write_failures.load(Ordering::Relaxed)
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }
}

impl<C: Completer> Completer for Recording<C> {
    async fn complete(&self, example_id: &str, prompt: &str) -> RunRecord {
        if let Some(prev) = self.ledger.previous(example_id, prompt) {
            if matches!(prev.status, RunStatus::Ok | RunStatus::Filtered) {
                self.reused.fetch_add(1, Ordering::Relaxed);
                return prev.clone();
            }
        }
        let record = self.inner.complete(example_id, prompt).await;
        if let Err(e) = self.ledger.append(&record) {
            tracing::error!("{e}");
            self.write_failures.fetch_add(1, Ordering::Relaxed);
        }
        record
    }

    fn max_in_flight(&self) -> usize {
        self.inner.max_in_flight()
    }
}

/// Answers prompts from a ledger file only. Prompts missing from the ledger
/// come back as `Error` records.
#[derive(Debug)]
pub struct LedgerReplay {
    records: HashMap<Key, RunRecord>,
    misses: AtomicUsize,
}

impl LedgerReplay {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ClientError> {
        Ok(Self::from_records(read_records(path.as_ref())?))
    }

    pub fn from_records(records: Vec<RunRecord>) -> Self {
        LedgerReplay {
            records: index(records),
            misses: AtomicUsize::new(0),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn misses(&self) -> usize {
        self.misses.load(Ordering::Relaxed)
    }
}

impl Completer for LedgerReplay {
    async fn complete(&self, example_id: &str, prompt: &str) -> RunRecord {
        match self.records.get(&(example_id.to_owned(), prompt.to_owned())) {
            Some(record) => record.clone(),
            None => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                RunRecord::failed(example_id, prompt, RunStatus::Error, 0, "not in ledger")
            }
        }
    }

    fn max_in_flight(&self) -> usize {
        64
    }
}
