use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::ClientError;

fn default_api_key_env() -> String {
    "OPENAI_API_KEY".to_owned()
}

fn default_max_in_flight() -> usize {
    4
}

fn default_timeout_secs() -> f64 {
    60.0
}

fn default_retries() -> u32 {
    3
}

fn default_backoff_ms() -> u64 {
    500
}

/// Where and how to reach a chat-completion endpoint.
///
/// `base_url` is the API root; requests go to `{base_url}/chat/completions`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub base_url: String,
    #[serde(alias = "model")]
    pub model_name: String,
    #[serde(default = "default_api_key_env")]
    pub api_key_env: String,
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: f64,
    #[serde(default = "default_retries")]
    pub retries: u32,
    /// First retry delay; doubles on every further attempt.
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
    /// Left out of requests unless set, so the endpoint default applies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
}

impl EndpointConfig {
    pub fn new(base_url: impl Into<String>, model_name: impl Into<String>) -> Self {
        EndpointConfig {
            base_url: base_url.into(),
            model_name: model_name.into(),
            api_key_env: default_api_key_env(),
            max_in_flight: default_max_in_flight(),
            timeout_secs: default_timeout_secs(),
            retries: default_retries(),
            backoff_ms: default_backoff_ms(),
            temperature: None,
        }
    }

    pub fn validate(&self) -> Result<(), ClientError> {
        if self.max_in_flight == 0 {
            return Err(ClientError::Config("max_in_flight must be at least 1".into()));
        }
        if !(self.timeout_secs > 0.0 && self.timeout_secs.is_finite()) {
            return Err(ClientError::Config("timeout_secs must be positive".into()));
        }
        reqwest::Url::parse(&self.base_url)
            .map_err(|e| ClientError::Config(format!("base_url '{}': {e}", self.base_url)))?;
        Ok(())
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_secs)
    }

    pub fn completions_url(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }
}
