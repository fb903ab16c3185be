use std::fmt;
use std::time::{Duration, Instant};

use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::EndpointConfig;
use crate::ledger::{RunRecord, RunStatus};
use crate::protocol::Completer;
use crate::ClientError;

const END_MARKERS: [&str; 5] = ["<|endoftext|>", "</s>", "<|im_end|>", "<|eot_id|>", "<eos>"];

/// Trims whitespace and at most one trailing end-of-text marker.
pub fn postprocess_response(text: &str) -> String {
    let text = text.trim();
    let stripped = END_MARKERS
        .iter()
        .find_map(|m| text.strip_suffix(m))
        .unwrap_or(text);
    stripped.trim().to_owned()
}

#[derive(Deserialize)]
struct ChatResponse {
    #[serde(default)]
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    #[serde(default)]
    message: Option<Message>,
    #[serde(default)]
    finish_reason: Option<String>,
}

#[derive(Deserialize)]
struct Message {
    #[serde(default)]
    content: Option<String>,
}

fn is_filter_code(code: &str) -> bool {
    code == "content_filter" || code.starts_with("ResponsibleAIPolicy")
}

fn error_body_is_filter(body: &str) -> bool {
    let Ok(value) = serde_json::from_str::<Value>(body) else {
        return false;
    };
    let error = &value["error"];
    [&error["code"], &error["innererror"]["code"], &error["type"]]
        .iter()
        .filter_map(|v| v.as_str())
        .any(is_filter_code)
}

enum Attempt {
    Done(RunStatus, Result<String, String>),
    Transient(RunStatus, String),
}

/// HTTP client for one chat-completion endpoint.
pub struct ChatClient {
    http: reqwest::Client,
    config: EndpointConfig,
    api_key: String,
}

impl fmt::Debug for ChatClient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChatClient")
            .field("config", &self.config)
            .field("api_key", &"<redacted>")
            .finish()
    }
}

impl ChatClient {
    /// Reads the API key from the variable named by `config.api_key_env`.
    pub fn from_env(config: EndpointConfig) -> Result<Self, ClientError> {
        let key = std::env::var(&config.api_key_env)
            .map_err(|_| ClientError::MissingApiKey(config.api_key_env.clone()))?;
        Self::with_api_key(config, key)
    }

    pub fn with_api_key(config: EndpointConfig, api_key: String) -> Result<Self, ClientError> {
        config.validate()?;
        let http = reqwest::Client::builder()
            .timeout(config.timeout())
            .build()?;
        Ok(ChatClient {
            http,
            config,
            api_key,
        })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    fn request_body(&self, prompt: &str) -> Value {
        let mut body = json!({
            "model": self.config.model_name,
            "messages": [{"role": "user", "content": prompt}],
        });
        if let Some(t) = self.config.temperature {
            body["temperature"] = json!(t);
        }
        body
    }

    async fn attempt(&self, prompt: &str) -> Attempt {
        let sent = self
            .http
            .post(self.config.completions_url())
            .bearer_auth(&self.api_key)
            .json(&self.request_body(prompt))
            .send()
            .await;
        let response = match sent {
            Ok(r) => r,
            Err(e) if e.is_timeout() => {
                return Attempt::Transient(RunStatus::Timeout, "request timed out".into())
            }
            Err(e) if e.is_connect() || e.is_request() => {
                return Attempt::Transient(RunStatus::Error, format!("connection failed: {e}"))
            }
            Err(e) => return Attempt::Done(RunStatus::Error, Err(e.to_string())),
        };
        let status = response.status();
        let body = match response.text().await {
            Ok(b) => b,
            Err(e) if e.is_timeout() => {
                return Attempt::Transient(RunStatus::Timeout, "response body timed out".into())
            }
            Err(e) => return Attempt::Transient(RunStatus::Error, format!("reading body: {e}")),
        };
        if status.as_u16() == 429 || status.is_server_error() {
            return Attempt::Transient(RunStatus::Error, format!("HTTP {status}"));
        }
        if !status.is_success() {
            if error_body_is_filter(&body) {
                return Attempt::Done(RunStatus::Filtered, Err(format!("HTTP {status}: filtered")));
            }
            return Attempt::Done(RunStatus::Error, Err(format!("HTTP {status}")));
        }
        let parsed: ChatResponse = match serde_json::from_str(&body) {
            Ok(p) => p,
            Err(e) => return Attempt::Done(RunStatus::Error, Err(format!("bad response: {e}"))),
        };
        let Some(choice) = parsed.choices.into_iter().next() else {
            return Attempt::Done(RunStatus::Error, Err("response has no choices".into()));
        };
        if choice.finish_reason.as_deref() == Some("content_filter") {
            return Attempt::Done(RunStatus::Filtered, Err("finish_reason content_filter".into()));
        }
        match choice.message.and_then(|m| m.content) {
            Some(text) => Attempt::Done(RunStatus::Ok, Ok(postprocess_response(&text))),
            None => Attempt::Done(RunStatus::Error, Err("response has no content".into())),
        }
    }
}

impl Completer for ChatClient {
    async fn complete(&self, example_id: &str, prompt: &str) -> RunRecord {
        let start = Instant::now();
        let mut retries_left = self.config.retries;
        let mut delay = Duration::from_millis(self.config.backoff_ms);
        let (status, outcome) = loop {
            match self.attempt(prompt).await {
                Attempt::Done(status, outcome) => break (status, outcome),
                Attempt::Transient(status, message) => {
                    if retries_left == 0 {
                        break (status, Err(message));
                    }
                    tracing::warn!(example_id, %message, ?delay, "retrying");
                    retries_left -= 1;
                    tokio::time::sleep(delay).await;
                    delay = delay.saturating_mul(2);
                }
            }
        };
        let latency_ms = start.elapsed().as_millis() as u64;
        match outcome {
            Ok(text) => RunRecord::ok(example_id, prompt, text, latency_ms),
            Err(detail) => RunRecord::failed(example_id, prompt, status, latency_ms, detail),
        }
    }

    fn max_in_flight(&self) -> usize {
        self.config.max_in_flight
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn postprocess() {
        assert_eq!(postprocess_response("  Привіт.  \n"), "Привіт.");
        assert_eq!(postprocess_response("Привіт.</s>"), "Привіт.");
        assert_eq!(postprocess_response("Привіт. <|endoftext|> "), "Привіт.");
        assert_eq!(postprocess_response("a</s></s>"), "a</s>");
        assert_eq!(postprocess_response("a <eos> b"), "a <eos> b");
    }

    #[test]
    fn filter_detection() {
        assert!(error_body_is_filter(
            r#"{"error":{"code":"content_filter","message":"x"}}"#
        ));
        assert!(error_body_is_filter(
            r#"{"error":{"code":"invalid_prompt","innererror":{"code":"ResponsibleAIPolicyViolation"}}}"#
        ));
        assert!(!error_body_is_filter(r#"{"error":{"code":"invalid_api_key"}}"#));
        assert!(!error_body_is_filter("not json"));
    }

    #[test]
    fn debug_hides_key() {
        let cfg = EndpointConfig::new("http://localhost:1/v1", "m");
        let client = ChatClient::with_api_key(cfg, "sk-secret".into()).unwrap();
        assert!(!format!("{client:?}").contains("sk-secret"));
    }

    #[test]
    fn temperature_only_when_set() {
        let mut cfg = EndpointConfig::new("http://localhost:1/v1", "m");
        let client = ChatClient::with_api_key(cfg.clone(), String::new()).unwrap();
        assert!(client.request_body("p").get("temperature").is_none());
        cfg.temperature = Some(0.0);
        let client = ChatClient::with_api_key(cfg, String::new()).unwrap();
        assert_eq!(client.request_body("p")["temperature"], json!(0.0));
        assert_eq!(client.request_body("p")["messages"][0]["content"], "p");
    }
}
