//! Corpus handling, instruction-dataset construction and scoring for
//! Ukrainian text-editing systems.
//!
//! The crate is organised around four pieces:
//!
//! * [`corpus`]: tasks, parallel examples, tokenization, M2 and JSONL/TSV IO.
//! * [`instruct`]: the verbalizer registry and the seeded dataset transforms
//!   (verbalizer assignment, train/validation split, task-ablation mixtures).
//! * [`gecscore`]: span-based F0.5 scoring of grammatical error correction.
//! * [`textmetrics`]: SARI and BLEU, plus per-task dispatch into score reports.

pub mod corpus;
pub mod error;
pub mod gecscore;
pub mod instruct;
pub mod textmetrics;

pub use error::{Error, Result};
