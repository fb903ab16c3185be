use std::future::Future;

use futures::stream::{self, StreamExt};
use redaktor_core::corpus::{ParallelExample, Task};
use redaktor_core::instruct::Verbalizer;
use serde::Serialize;

use crate::ledger::RunRecord;
use crate::ClientError;

/// Anything that turns a prompt into a run record without failing.
pub trait Completer: Sync {
    fn complete(&self, example_id: &str, prompt: &str) -> impl Future<Output = RunRecord> + Send;

    fn max_in_flight(&self) -> usize;
}

impl<C: Completer> Completer for &C {
    fn complete(&self, example_id: &str, prompt: &str) -> impl Future<Output = RunRecord> + Send {
        (**self).complete(example_id, prompt)
    }

    fn max_in_flight(&self) -> usize {
        (**self).max_in_flight()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroShotRun {
    pub verbalizer_id: String,
    /// (example id, output text), in input order.
    pub outputs: Vec<(String, String)>,
    pub records: Vec<RunRecord>,
}

impl ZeroShotRun {
    pub fn texts(&self) -> Vec<String> {
        self.outputs.iter().map(|(_, t)| t.clone()).collect()
    }

    /// Number of examples that fell back to the unchanged source.
    pub fn fallbacks(&self) -> usize {
        self.records.iter().filter(|r| r.response_text.is_none()).count()
    }
}

/// Prompts `verbalizer + " " + source` for every example. Examples without an
/// ok response keep their source text as output.
pub async fn run_zero_shot<C: Completer>(
    completer: &C,
    examples: &[ParallelExample],
    verbalizer: &Verbalizer,
) -> Result<ZeroShotRun, ClientError> {
    if let Some(ex) = examples.iter().find(|e| e.task != verbalizer.task) {
        return Err(ClientError::TaskMismatch {
            verbalizer: verbalizer.id.clone(),
            verbalizer_task: verbalizer.task,
            example_task: ex.task,
        });
    }
    let prompts: Vec<String> = examples
        .iter()
        .map(|e| format!("{} {}", verbalizer.text_uk, e.source))
        .collect();

    let mut slots: Vec<Option<RunRecord>> = vec![None; examples.len()];
    let mut pending = stream::iter(examples.iter().zip(&prompts).enumerate())
        .map(|(i, (ex, prompt))| async move { (i, completer.complete(&ex.id, prompt).await) })
        .buffer_unordered(completer.max_in_flight().max(1));
    while let Some((i, record)) = pending.next().await {
        slots[i] = Some(record);
    }

    let records: Vec<RunRecord> = slots
        .into_iter()
        .map(|r| r.expect("every example completes"))
        .collect();
    let outputs = examples
        .iter()
        .zip(&records)
        .map(|(ex, rec)| (ex.id.clone(), rec.output_or(&ex.source).to_owned()))
        .collect();
    Ok(ZeroShotRun {
        verbalizer_id: verbalizer.id.clone(),
        outputs,
        records,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VerbalizerRun {
    pub verbalizer_id: String,
    pub instruction: String,
    pub score: f64,
    pub fallbacks: usize,
    #[serde(skip)]
    pub run: ZeroShotRun,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub task: Task,
    pub best_verbalizer_id: String,
    pub best_score: f64,
    pub per_verbalizer: Vec<VerbalizerRun>,
}

/// Runs every verbalizer of `task` over the examples and keeps the best
/// score. Verbalizers are visited in id order; ties keep the lower id.
pub async fn sweep_verbalizers<C, F, E>(
    completer: &C,
    examples: &[ParallelExample],
    registry: &[Verbalizer],
    task: Task,
    mut scorer: F,
) -> Result<SweepResult, ClientError>
where
    C: Completer,
    F: FnMut(&[String]) -> Result<f64, E>,
    E: std::fmt::Display,
{
    let mut verbalizers: Vec<&Verbalizer> = registry.iter().filter(|v| v.task == task).collect();
    if verbalizers.is_empty() {
        return Err(ClientError::NoVerbalizers(task));
    }
    verbalizers.sort_by(|a, b| a.id.cmp(&b.id));

    let mut per_verbalizer = Vec::with_capacity(verbalizers.len());
    let mut best: Option<(usize, f64)> = None;
    for verbalizer in verbalizers {
        let run = run_zero_shot(completer, examples, verbalizer).await?;
        let score = scorer(&run.texts()).map_err(|e| ClientError::Scorer(e.to_string()))?;
        tracing::info!(verbalizer = %verbalizer.id, score, "sweep step");
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((per_verbalizer.len(), score));
        }
        per_verbalizer.push(VerbalizerRun {
            verbalizer_id: verbalizer.id.clone(),
            instruction: verbalizer.text_uk.clone(),
            score,
            fallbacks: run.fallbacks(),
            run,
        });
    }
    let (idx, best_score) = best.expect("at least one verbalizer");
    Ok(SweepResult {
        task,
        best_verbalizer_id: per_verbalizer[idx].verbalizer_id.clone(),
        best_score,
        per_verbalizer,
    })
}
