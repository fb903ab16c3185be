//! SARI and BLEU, and per-task score dispatch.

mod bleu;
mod ngrams;
mod sari;

pub use bleu::{bleu_corpus, bleu_stats, BleuMode, BleuScore, BleuStats};
pub use sari::{sari_corpus, sari_sentence, SariInput, SariScore};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{GoldAnnotation, ParallelExample, Task};
use crate::error::{Error, Result};
use crate::gecscore::{score_gec_corpus, DEFAULT_BETA};

pub const METRIC_F05: &str = "f0.5";
pub const METRIC_SARI: &str = "sari";
pub const METRIC_BLEU_REF_FREE: &str = "bleu_ref_free";
pub const METRIC_BLEU_REF_BASED: &str = "bleu_ref_based";

/// Metric names reported for a task, in display order.
pub fn task_metrics(task: Task) -> &'static [&'static str] {
    match task {
        Task::Gec => &[METRIC_F05],
        Task::Simplification | Task::Coherence => &[METRIC_SARI],
        Task::Paraphrasing => &[METRIC_BLEU_REF_FREE, METRIC_BLEU_REF_BASED],
    }
}

/// The metric a sweep maximizes for a task.
pub fn primary_metric(task: Task) -> &'static str {
    match task {
        Task::Gec => METRIC_F05,
        Task::Simplification | Task::Coherence => METRIC_SARI,
        Task::Paraphrasing => METRIC_BLEU_REF_BASED,
    }
}

pub type MetricValues = BTreeMap<String, f64>;

/// Scores for one task on the 0-100 scale, per dataset and aggregated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskScore {
    pub task: Task,
    pub datasets: BTreeMap<String, MetricValues>,
    pub aggregate: MetricValues,
}

impl TaskScore {
    pub fn primary(&self) -> f64 {
        self.aggregate
            .get(primary_metric(self.task))
            .copied()
            .unwrap_or(0.0)
    }
}

fn group_by_dataset(corpus: &[ParallelExample]) -> BTreeMap<&str, Vec<usize>> {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, example) in corpus.iter().enumerate() {
        groups.entry(example.dataset.as_str()).or_default().push(i);
    }
    groups
}

fn values(pairs: &[(&str, f64)]) -> MetricValues {
    pairs.iter().map(|&(k, v)| (k.to_owned(), v)).collect()
}

/// Scores system outputs on a task's test corpus.
///
/// GEC goes through span-based F0.5 against `gold`; simplification and
/// coherence use SARI; paraphrasing reports reference-free and
/// reference-based BLEU. Per-dataset values are computed on each dataset's
/// slice. Aggregates weight datasets by example count: SARI is the mean over
/// all sentences and BLEU pools its n-gram statistics.
pub fn score_task(
    task: Task,
    outputs: &[String],
    corpus: &[ParallelExample],
    gold: Option<&[GoldAnnotation]>,
) -> Result<TaskScore> {
    if outputs.len() != corpus.len() {
        return Err(Error::Argument(format!(
            "{} outputs for {} test examples",
            outputs.len(),
            corpus.len()
        )));
    }
    if corpus.is_empty() {
        return Err(Error::Argument("empty test corpus".into()));
    }
    if let Some(i) = corpus.iter().position(|e| e.task != task) {
        return Err(Error::Scoring {
            index: i,
            message: format!("example belongs to {}, not {task}", corpus[i].task),
        });
    }
    let groups = group_by_dataset(corpus);
    let mut datasets = BTreeMap::new();

    let aggregate = match task {
        Task::Gec => {
            let gold = gold.ok_or_else(|| {
                Error::Config("GEC scoring needs gold M2 annotations".into())
            })?;
            let sources: Vec<String> = corpus.iter().map(|e| e.source.clone()).collect();
            let report = score_gec_corpus(&sources, outputs, gold, DEFAULT_BETA)?;
            for (name, idx) in &groups {
                let (tp, fp, fn_) = idx.iter().fold((0, 0, 0), |(tp, fp, fn_), &i| {
                    let r = report.sentences[i];
                    (tp + r.tp, fp + r.fp, fn_ + r.fn_)
                });
                let score = crate::gecscore::GecCorpusScore::from_counts(tp, fp, fn_, DEFAULT_BETA);
                datasets.insert((*name).to_owned(), values(&[(METRIC_F05, score.scaled)]));
            }
            values(&[(METRIC_F05, report.score.scaled)])
        }
        Task::Simplification | Task::Coherence => {
            let inputs: Vec<SariInput> = corpus
                .iter()
                .zip(outputs)
                .map(|(e, out)| SariInput {
                    source: &e.source,
                    hypothesis: out,
                    references: &e.references,
                })
                .collect();
            for (name, idx) in &groups {
                let slice: Vec<SariInput> = idx.iter().map(|&i| inputs[i]).collect();
                let score = sari_corpus(&slice)?;
                datasets.insert((*name).to_owned(), values(&[(METRIC_SARI, score.scaled)]));
            }
            values(&[(METRIC_SARI, sari_corpus(&inputs)?.scaled)])
        }
        Task::Paraphrasing => {
            let mut pooled_free = BleuStats::default();
            let mut pooled_based = BleuStats::default();
            for (name, idx) in &groups {
                let hyps: Vec<&str> = idx.iter().map(|&i| outputs[i].as_str()).collect();
                let sources: Vec<Vec<String>> =
                    idx.iter().map(|&i| vec![corpus[i].source.clone()]).collect();
                let refs: Vec<Vec<String>> =
                    idx.iter().map(|&i| corpus[i].references.clone()).collect();
                let free = bleu_stats(&hyps, &sources)?;
                let based = bleu_stats(&hyps, &refs)?;
                pooled_free += free;
                pooled_based += based;
                datasets.insert(
                    (*name).to_owned(),
                    values(&[
                        (METRIC_BLEU_REF_FREE, free.score(BleuMode::ReferenceFree).scaled),
                        (METRIC_BLEU_REF_BASED, based.score(BleuMode::ReferenceBased).scaled),
                    ]),
                );
            }
            values(&[
                (METRIC_BLEU_REF_FREE, pooled_free.score(BleuMode::ReferenceFree).scaled),
                (METRIC_BLEU_REF_BASED, pooled_based.score(BleuMode::ReferenceBased).scaled),
            ])
        }
    };

    Ok(TaskScore {
        task,
        datasets,
        aggregate,
    })
}
