//! Instruction-dataset construction: verbalizer registry, seeded verbalizer
//! assignment, train/validation splitting and task-ablation mixtures.
//!
//! All randomness comes from ChaCha8 seeded with a 64-bit value, so splits
//! and assignments reproduce across platforms for a given seed.

mod dataset;
mod registry;

pub use dataset::{
    assign_verbalizers, build_ablation_mixture, derive_seed, split_train_val, InstructionExample,
    InstructionRecord, Mixture,
};
pub use registry::{
    counts_by_task, for_task, load_registry_file, load_verbalizer_registry, Verbalizer,
};
