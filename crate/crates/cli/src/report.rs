//! Score reports and their text rendering.
//!
//! JSON reports keep full precision; values are rounded to two decimals
//! only when rendered as text.

use anyhow::{bail, Result};
use redaktor_core::corpus::Task;
use redaktor_core::textmetrics::{
    task_metrics, MetricValues, TaskScore, METRIC_BLEU_REF_BASED, METRIC_BLEU_REF_FREE,
};
use serde::{Deserialize, Serialize};

pub const AGGREGATE: &str = "aggregate";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemInfo {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: String,
    pub size: String,
}

impl Default for SystemInfo {
    fn default() -> Self {
        SystemInfo {
            name: "system".into(),
            kind: "-".into(),
            size: "-".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub toolkit_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub created: String,
}

impl Metadata {
    pub fn now(seed: Option<u64>) -> Self {
        Metadata {
            toolkit_version: env!("CARGO_PKG_VERSION").into(),
            seed,
            created: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub system: String,
    pub task: Task,
    pub dataset: String,
    pub metrics: MetricValues,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub metadata: Metadata,
    pub systems: Vec<SystemInfo>,
    pub rows: Vec<ScoreRow>,
}

impl ScoreReport {
    pub fn from_task_score(system: SystemInfo, score: &TaskScore, metadata: Metadata) -> Self {
        let mut rows: Vec<ScoreRow> = score
            .datasets
            .iter()
            .map(|(dataset, metrics)| ScoreRow {
                system: system.name.clone(),
                task: score.task,
                dataset: dataset.clone(),
                metrics: metrics.clone(),
            })
            .collect();
        rows.push(ScoreRow {
            system: system.name.clone(),
            task: score.task,
            dataset: AGGREGATE.into(),
            metrics: score.aggregate.clone(),
        });
        ScoreReport {
            metadata,
            systems: vec![system],
            rows,
        }
    }

    /// Paraphrasing rows carry both BLEU values, other rows their single
    /// metric, and every value lies in [0, 100].
    pub fn validate(&self) -> Result<()> {
        for row in &self.rows {
            let expected = task_metrics(row.task);
            let keys: Vec<&str> = row.metrics.keys().map(String::as_str).collect();
            let mut wanted: Vec<&str> = expected.to_vec();
            wanted.sort_unstable();
            if keys != wanted {
                bail!(
                    "{} {} {}: metrics {keys:?}, expected {wanted:?}",
                    row.system,
                    row.task,
                    row.dataset
                );
            }
            if let Some((k, v)) = row.metrics.iter().find(|(_, v)| !(0.0..=100.0).contains(*v)) {
                bail!("{} {} {}: {k} = {v} outside [0, 100]", row.system, row.task, row.dataset);
            }
            if !self.systems.iter().any(|s| s.name == row.system) {
                bail!("row for unknown system {}", row.system);
            }
        }
        Ok(())
    }

    /// Concatenates reports. Later rows for the same (system, task, dataset)
    /// replace earlier ones.
    pub fn merge(reports: Vec<ScoreReport>, metadata: Metadata) -> ScoreReport {
        let mut systems: Vec<SystemInfo> = Vec::new();
        let mut rows: Vec<ScoreRow> = Vec::new();
        for report in reports {
            for system in report.systems {
                match systems.iter_mut().find(|s| s.name == system.name) {
                    Some(existing) => *existing = system,
                    None => systems.push(system),
                }
            }
            for row in report.rows {
                match rows.iter_mut().find(|r| {
                    r.system == row.system && r.task == row.task && r.dataset == row.dataset
                }) {
                    Some(existing) => *existing = row,
                    None => rows.push(row),
                }
            }
        }
        ScoreReport {
            metadata,
            systems,
            rows,
        }
    }

    fn find(&self, system: &str, task: Task, dataset: &str) -> Option<&MetricValues> {
        self.rows
            .iter()
            .find(|r| r.system == system && r.task == task && r.dataset == dataset)
            .map(|r| &r.metrics)
    }
}

/// `100.00/31.40` for paraphrasing, `21.98` otherwise.
pub fn format_cell(task: Task, metrics: &MetricValues) -> String {
    match task {
        Task::Paraphrasing => format!(
            "{:.2}/{:.2}",
            metrics.get(METRIC_BLEU_REF_FREE).copied().unwrap_or(f64::NAN),
            metrics.get(METRIC_BLEU_REF_BASED).copied().unwrap_or(f64::NAN)
        ),
        _ => match task_metrics(task).first().and_then(|m| metrics.get(*m)) {
            Some(v) => format!("{v:.2}"),
            None => String::new(),
        },
    }
}

pub fn dataset_label(dataset: &str) -> String {
    match dataset {
        "ua-gec" => "UA-GEC".into(),
        "asset" => "Asset".into(),
        "turk" => "Turk".into(),
        "discofuse" => "DiscoFuse".into(),
        "iterater" => "IteraTeR".into(),
        "mrpc" => "MRPC".into(),
        "sts" => "STS".into(),
        "qqp" => "QQP".into(),
        "wikilarge" => "WikiLarge".into(),
        "wikiauto" => "WikiAuto".into(),
        "paws" => "PAWS".into(),
        other => other.to_owned(),
    }
}

pub fn task_label(task: Task) -> &'static str {
    match task {
        Task::Gec => "GEC",
        Task::Simplification => "Simplification",
        Task::Coherence => "Coherence",
        Task::Paraphrasing => "Paraphrasing",
    }
}

fn width(s: &str) -> usize {
    s.chars().count()
}

/// Left-aligns the first column and right-aligns the rest.
pub fn render_table(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| width(h)).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate().take(cols) {
            widths[i] = widths[i].max(width(cell));
        }
    }
    let line = |cells: &[String]| {
        let parts: Vec<String> = (0..cols)
            .map(|i| {
                let cell = cells.get(i).map(String::as_str).unwrap_or("");
                let pad = " ".repeat(widths[i] - width(cell));
                if i == 0 { format!("{cell}{pad}") } else { format!("{pad}{cell}") }
            })
            .collect();
        parts.join("  ").trim_end().to_owned() + "\n"
    };
    let mut out = line(header);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&rule.join("  "));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
    }
    out
}

/// Model, Type, Size and one aggregate column per task.
pub fn summary_table(report: &ScoreReport) -> String {
    let mut header: Vec<String> = ["Model", "Type", "Size"].map(String::from).to_vec();
    header.extend(Task::ALL.iter().map(|t| task_label(*t).to_owned()));
    let rows: Vec<Vec<String>> = report
        .systems
        .iter()
        .map(|system| {
            let mut row = vec![system.name.clone(), system.kind.clone(), system.size.clone()];
            row.extend(Task::ALL.iter().map(|&task| {
                report
                    .find(&system.name, task, AGGREGATE)
                    .map(|m| format_cell(task, m))
                    .unwrap_or_default()
            }));
            row
        })
        .collect();
    render_table(&header, &rows)
}

/// One column per (task, dataset) for the multi-dataset tasks, in task
/// order and then the task's own dataset order.
pub fn per_dataset_table(report: &ScoreReport) -> String {
    let mut columns: Vec<(Task, String)> = Vec::new();
    for task in [Task::Simplification, Task::Coherence, Task::Paraphrasing] {
        let mut present: Vec<&str> = report
            .rows
            .iter()
            .filter(|r| r.task == task && r.dataset != AGGREGATE)
            .map(|r| r.dataset.as_str())
            .collect();
        let order = |d: &str| task.datasets().iter().position(|x| *x == d).unwrap_or(usize::MAX);
        present.sort_by(|a, b| order(a).cmp(&order(b)).then(a.cmp(b)));
        present.dedup();
        columns.extend(present.into_iter().map(|d| (task, d.to_owned())));
    }
    let mut header = vec!["Model".to_owned()];
    header.extend(
        columns
            .iter()
            .map(|(t, d)| format!("{} {}", task_label(*t), dataset_label(d))),
    );
    let rows: Vec<Vec<String>> = report
        .systems
        .iter()
        .map(|system| {
            let mut row = vec![system.name.clone()];
            row.extend(columns.iter().map(|(task, dataset)| {
                report
                    .find(&system.name, *task, dataset)
                    .map(|m| format_cell(*task, m))
                    .unwrap_or_default()
            }));
            row
        })
        .collect();
    render_table(&header, &rows)
}

/// Both tables, for writing next to a JSON report.
pub fn render_report(report: &ScoreReport) -> String {
    let mut out = summary_table(report);
    let per_dataset = per_dataset_table(report);
    if per_dataset.lines().next().is_some_and(|h| h.trim() != "Model") {
        out.push('\n');
        out.push_str(&per_dataset);
    }
    out
}

/// Per-dataset rows of a single-task score, aggregate last.
pub fn task_score_table(score: &TaskScore) -> String {
    let header = vec!["Dataset".to_owned(), task_label(score.task).to_owned()];
    let mut rows: Vec<Vec<String>> = score
        .datasets
        .iter()
        .map(|(d, m)| vec![dataset_label(d), format_cell(score.task, m)])
        .collect();
    rows.push(vec![AGGREGATE.to_owned(), format_cell(score.task, &score.aggregate)]);
    render_table(&header, &rows)
}
