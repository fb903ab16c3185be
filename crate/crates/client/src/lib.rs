//! Zero-shot baselines against chat-completion endpoints.
//!
//! A prompt is the verbalizer, a space, then the source text, sent as the
//! only user message. Requests run with bounded concurrency and bounded
//! retries; results come back in input order. Any request that ends without
//! a usable answer (content filter, error, timeout) falls back to the
//! unchanged source text. Every completed request can be persisted to a
//! JSONL run ledger and replayed later without network access.

mod chat;
mod config;
mod ledger;
mod protocol;
#[cfg(feature = "test-util")]
pub mod stub;

pub use chat::{postprocess_response, ChatClient};
pub use config::EndpointConfig;
pub use ledger::{LedgerReplay, Recording, RunLedger, RunRecord, RunStatus};
pub use protocol::{
    run_zero_shot, sweep_verbalizers, Completer, SweepResult, VerbalizerRun, ZeroShotRun,
};

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("invalid endpoint configuration: {0}")]
    Config(String),

    #[error("environment variable {0} with the API key is not set")]
    MissingApiKey(String),

    #[error("no verbalizers registered for task {0}")]
    NoVerbalizers(redaktor_core::corpus::Task),

    #[error("verbalizer {verbalizer} is for {verbalizer_task}, examples are {example_task}")]
    TaskMismatch {
        verbalizer: String,
        verbalizer_task: redaktor_core::corpus::Task,
        example_task: redaktor_core::corpus::Task,
    },

    #[error("scorer failed: {0}")]
    Scorer(String),

    #[error("run ledger {path}: {message}")]
    Ledger { path: String, message: String },

    #[error(transparent)]
    Http(#[from] reqwest::Error),
}
