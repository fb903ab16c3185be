use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the four text-editing tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Gec,
    Simplification,
    Coherence,
    Paraphrasing,
}

impl Task {
    pub const ALL: [Task; 4] = [
        Task::Gec,
        Task::Simplification,
        Task::Coherence,
        Task::Paraphrasing,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Gec => "gec",
            Task::Simplification => "simplification",
            Task::Coherence => "coherence",
            Task::Paraphrasing => "paraphrasing",
        }
    }

    /// Datasets a task may draw examples from.
    pub fn datasets(self) -> &'static [&'static str] {
        match self {
            Task::Gec => &["ua-gec"],
            Task::Simplification => &["wikilarge", "wikiauto", "asset", "turk"],
            Task::Coherence => &["discofuse", "iterater"],
            Task::Paraphrasing => &["paws", "mrpc", "sts", "qqp"],
        }
    }

    pub fn allows_dataset(self, dataset: &str) -> bool {
        self.datasets().contains(&dataset)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gec" | "fluency" => Ok(Task::Gec),
            "simplification" | "simplify" => Ok(Task::Simplification),
            "coherence" => Ok(Task::Coherence),
            "paraphrasing" | "paraphrase" => Ok(Task::Paraphrasing),
            other => Err(Error::Argument(format!(
                "unknown task '{other}', expected one of gec, simplification, coherence, paraphrasing"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "validation" | "valid" | "dev" | "val" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(Error::Argument(format!("unknown split '{other}'"))),
        }
    }
}

/// A source text with one or more reference rewrites.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelExample {
    pub id: String,
    pub task: Task,
    pub dataset: String,
    pub split: Split,
    pub source: String,
    pub references: Vec<String>,
}

impl ParallelExample {
    /// Builds an example, checking the non-empty source/references and the
    /// task/dataset pairing.
    pub fn new(
        id: impl Into<String>,
        task: Task,
        dataset: impl Into<String>,
        split: Split,
        source: impl Into<String>,
        references: Vec<String>,
    ) -> Result<Self> {
        let example = ParallelExample {
            id: id.into(),
            task,
            dataset: dataset.into(),
            split,
            source: source.into(),
            references,
        };
        example.validate()?;
        Ok(example)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.task.allows_dataset(&self.dataset) {
            return Err(Error::Argument(format!(
                "dataset '{}' is not a {} dataset",
                self.dataset, self.task
            )));
        }
        if self.source.trim().is_empty() {
            return Err(Error::Argument("empty source text".into()));
        }
        if self.references.is_empty() {
            return Err(Error::Argument("example has no references".into()));
        }
        Ok(())
    }

    /// The reference used wherever a single target is needed.
    pub fn primary_reference(&self) -> &str {
        &self.references[0]
    }
}
