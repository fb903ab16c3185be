//! In-process chat-completion server for tests.
//!
//! The reply echoes everything after the first `": "` of the prompt, so a
//! verbalizer prompt comes back as its source text. Markers in the prompt
//! change the behavior:
//!
//! - `[filter]`: HTTP 400 with a `content_filter` error code
//! - `[finish-filter]`: HTTP 200 with `finish_reason: content_filter`
//! - `[fail]`: HTTP 500 on every attempt
//! - `[flaky]`: HTTP 503 on the first attempt for that prompt, then echo
//! - `[slow]`: sleeps two seconds before answering

use std::collections::HashSet;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::State;
use axum::http::{HeaderMap, StatusCode};
use axum::routing::post;
use axum::{Json, Router};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

pub const STUB_API_KEY: &str = "stub-key";

#[derive(Debug)]
pub struct StubState {
    requests: AtomicUsize,
    in_flight: AtomicUsize,
    peak_in_flight: AtomicUsize,
    seen: Mutex<HashSet<String>>,
    prompts: Mutex<Vec<String>>,
    max_latency_ms: u64,
    rng: Mutex<StdRng>,
}

pub struct StubServer {
    pub addr: SocketAddr,
    state: Arc<StubState>,
    task: tokio::task::JoinHandle<()>,
}

impl StubServer {
    /// Binds to an ephemeral local port. Each request waits a random
    /// 0..=`max_latency_ms` before answering.
    pub async fn start(max_latency_ms: u64, seed: u64) -> StubServer {
        let state = Arc::new(StubState {
            requests: AtomicUsize::new(0),
            in_flight: AtomicUsize::new(0),
            peak_in_flight: AtomicUsize::new(0),
            seen: Mutex::new(HashSet::new()),
            prompts: Mutex::new(Vec::new()),
            max_latency_ms,
            rng: Mutex::new(StdRng::seed_from_u64(seed)),
        });
        let app = Router::new()
            .route("/v1/chat/completions", post(handle))
            .with_state(state.clone());
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0")
            .await
            .expect("bind stub listener");
        let addr = listener.local_addr().unwrap();
        let task = tokio::spawn(async move {
            axum::serve(listener, app).await.expect("stub server");
        });
        StubServer { addr, state, task }
    }

    pub fn base_url(&self) -> String {
        format!("http://{}/v1", self.addr)
    }

    pub fn requests(&self) -> usize {
        self.state.requests.load(Ordering::SeqCst)
    }

    pub fn peak_in_flight(&self) -> usize {
        self.state.peak_in_flight.load(Ordering::SeqCst)
    }

    /// Prompts in arrival order, retries included.
    pub fn prompts(&self) -> Vec<String> {
        self.state.prompts.lock().unwrap().clone()
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.task.abort();
    }
}

struct InFlight<'a>(&'a StubState);

impl Drop for InFlight<'_> {
    fn drop(&mut self) {
        self.0.in_flight.fetch_sub(1, Ordering::SeqCst);
    }
}

fn reply(content: &str, finish_reason: &str) -> Value {
    json!({
        "id": "stub",
        "object": "chat.completion",
        "choices": [{
            "index": 0,
            "message": {"role": "assistant", "content": content},
            "finish_reason": finish_reason,
        }],
    })
}

async fn handle(
    State(state): State<Arc<StubState>>,
    headers: HeaderMap,
    Json(body): Json<Value>,
) -> (StatusCode, Json<Value>) {
    state.requests.fetch_add(1, Ordering::SeqCst);
    let now = state.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
    state.peak_in_flight.fetch_max(now, Ordering::SeqCst);
    let _guard = InFlight(&state);

    let auth = headers.get("authorization").and_then(|v| v.to_str().ok());
    if auth != Some(&format!("Bearer {STUB_API_KEY}")) {
        return (
            StatusCode::UNAUTHORIZED,
            Json(json!({"error": {"code": "invalid_api_key"}})),
        );
    }
    let prompt = body["messages"][0]["content"].as_str().unwrap_or_default().to_owned();
    state.prompts.lock().unwrap().push(prompt.clone());

    let latency = {
        let mut rng = state.rng.lock().unwrap();
        rng.gen_range(0..=state.max_latency_ms)
    };
    tokio::time::sleep(Duration::from_millis(latency)).await;

    if prompt.contains("[slow]") {
        tokio::time::sleep(Duration::from_secs(2)).await;
    }
    if prompt.contains("[fail]") {
        return (
            StatusCode::INTERNAL_SERVER_ERROR,
            Json(json!({"error": {"message": "outage"}})),
        );
    }
    if prompt.contains("[flaky]") && state.seen.lock().unwrap().insert(prompt.clone()) {
        return (
            StatusCode::SERVICE_UNAVAILABLE,
            Json(json!({"error": {"message": "try again"}})),
        );
    }
    if prompt.contains("[filter]") {
        return (
            StatusCode::BAD_REQUEST,
            Json(json!({"error": {"code": "content_filter", "message": "filtered"}})),
        );
    }
    if prompt.contains("[finish-filter]") {
        return (StatusCode::OK, Json(reply("", "content_filter")));
    }
    let echo = prompt.split_once(": ").map_or(prompt.as_str(), |(_, rest)| rest);
    (StatusCode::OK, Json(reply(&format!("{echo}\n"), "stop")))
}
