use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::registry::Verbalizer;
use crate::corpus::{ParallelExample, Split, Task};
use crate::error::{Error, Result};

/// A parallel example paired with the verbalizer that introduces it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstructionExample {
    pub base: ParallelExample,
    pub verbalizer_id: String,
    pub instruction: String,
    pub prompt: String,
    pub target: String,
}

impl InstructionExample {
    pub fn new(base: ParallelExample, verbalizer: &Verbalizer) -> Self {
        let prompt = compose_prompt(&verbalizer.text_uk, &base.source);
        let target = base.primary_reference().to_owned();
        InstructionExample {
            verbalizer_id: verbalizer.id.clone(),
            instruction: verbalizer.text_uk.clone(),
            prompt,
            target,
            base,
        }
    }

    pub fn task(&self) -> Task {
        self.base.task
    }

    pub fn to_record(&self) -> InstructionRecord {
        InstructionRecord {
            id: Some(self.base.id.clone()),
            task: self.base.task,
            dataset: self.base.dataset.clone(),
            split: self.base.split,
            verbalizer_id: self.verbalizer_id.clone(),
            instruction: self.instruction.clone(),
            src: self.base.source.clone(),
            prompt: self.prompt.clone(),
            tgt: self.target.clone(),
        }
    }

    /// Rebuilds an example from its serialized record. Records without an
    /// id get `"<dataset>:<line_no>"`.
    pub fn from_record(record: InstructionRecord, line_no: usize) -> Result<Self> {
        let id = record
            .id
            .unwrap_or_else(|| format!("{}:{line_no}", record.dataset));
        let base = ParallelExample::new(
            id,
            record.task,
            record.dataset,
            record.split,
            record.src,
            vec![record.tgt.clone()],
        )?;
        if compose_prompt(&record.instruction, &base.source) != record.prompt {
            return Err(Error::Argument(
                "prompt is not the instruction followed by the source".into(),
            ));
        }
        Ok(InstructionExample {
            base,
            verbalizer_id: record.verbalizer_id,
            instruction: record.instruction,
            prompt: record.prompt,
            target: record.tgt,
        })
    }
}

/// One line of the instruction dataset JSONL.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstructionRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub task: Task,
    pub dataset: String,
    pub split: Split,
    pub verbalizer_id: String,
    pub instruction: String,
    pub src: String,
    pub prompt: String,
    pub tgt: String,
}

pub(crate) fn compose_prompt(instruction: &str, source: &str) -> String {
    format!("{instruction} {source}")
}

/// Mixes a base seed with a label into an independent 64-bit seed
/// (FNV-1a over the label, then a SplitMix64 finalizer).
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in label.bytes() {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ hash;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Pairs each example with a verbalizer drawn uniformly from its task's
/// subset of the registry.
pub fn assign_verbalizers(
    examples: &[ParallelExample],
    registry: &[Verbalizer],
    seed: u64,
) -> Result<Vec<InstructionExample>> {
    let mut by_task: BTreeMap<Task, Vec<&Verbalizer>> = BTreeMap::new();
    for verbalizer in registry {
        by_task.entry(verbalizer.task).or_default().push(verbalizer);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    examples
        .iter()
        .map(|example| {
            let pool = by_task.get(&example.task).ok_or_else(|| {
                Error::Config(format!("registry has no verbalizers for task {}", example.task))
            })?;
            let verbalizer = pool[rng.gen_range(0..pool.len())];
            Ok(InstructionExample::new(example.clone(), verbalizer))
        })
        .collect()
}

/// Draws `val_count` examples uniformly without replacement for validation.
/// Both halves keep the input's relative order.
pub fn split_train_val(
    examples: &[ParallelExample],
    val_count: usize,
    seed: u64,
) -> Result<(Vec<ParallelExample>, Vec<ParallelExample>)> {
    if val_count > examples.len() {
        return Err(Error::Argument(format!(
            "validation size {val_count} exceeds the {} available examples",
            examples.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_validation = vec![false; examples.len()];
    for i in index::sample(&mut rng, examples.len(), val_count) {
        in_validation[i] = true;
    }
    let (validation, train): (Vec<_>, Vec<_>) = examples
        .iter()
        .zip(in_validation)
        .partition(|(_, held)| *held);
    Ok((
        train.into_iter().map(|(e, _)| e.clone()).collect(),
        validation.into_iter().map(|(e, _)| e.clone()).collect(),
    ))
}

/// A training mixture over a subset of the tasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mixture {
    pub name: String,
    pub included_tasks: BTreeSet<Task>,
    pub seed: u64,
    pub examples: Vec<InstructionExample>,
}

impl Mixture {
    pub fn counts_by_task(&self) -> BTreeMap<Task, usize> {
        let mut counts: BTreeMap<Task, usize> =
            self.included_tasks.iter().map(|&t| (t, 0)).collect();
        for example in &self.examples {
            *counts.entry(example.task()).or_insert(0) += 1;
        }
        counts
    }
}

/// Keeps every example whose task is not `held_out`. `seed` is recorded as
/// the seed of the dataset the mixture was cut from.
pub fn build_ablation_mixture(full: &[InstructionExample], held_out: Task, seed: u64) -> Mixture {
    Mixture {
        name: format!("without-{held_out}"),
        included_tasks: Task::ALL.into_iter().filter(|&t| t != held_out).collect(),
        seed,
        examples: full
            .iter()
            .filter(|e| e.task() != held_out)
            .cloned()
            .collect(),
    }
}
