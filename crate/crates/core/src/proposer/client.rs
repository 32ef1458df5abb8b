use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::extract::{extract_candidates, fenced_blocks, Extraction};
use super::prompt::{
    build_comparison_prompt, build_crossover_prompt, build_mutation_prompt, build_prompt, SYSTEM_PROMPT,
};
use super::{OracleError, ProposalContext, ProposalOracle};
use crate::distance::{Choice, Comparator};
use crate::pddl::print_canonical;

pub const API_KEY_ENV: &str = "AXIOMFORGE_API_KEY";
pub const DEFAULT_MODEL: &str = "gpt-4o-mini-2024-07-18";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleClientConfig {
    pub base_url: String,
    pub model: String,
    pub api_key_env: String,
    pub temperature: f64,
    pub samples: usize,
    pub timeout_ms: u64,
    pub max_retries: u32,
    /// First retry delay; doubles on every further attempt.
    pub backoff_ms: u64,
}

impl Default for OracleClientConfig {
    fn default() -> Self {
        Self {
            base_url: "https://api.openai.com/v1".into(),
            model: DEFAULT_MODEL.into(),
            api_key_env: API_KEY_ENV.into(),
            temperature: 1.0,
            samples: 16,
            timeout_ms: 60_000,
            max_retries: 3,
            backoff_ms: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

/// Sends one JSON POST. `Err` means the exchange itself failed.
pub trait Transport: Send + Sync {
    fn post(&self, url: &str, bearer: &str, body: &str, timeout: Duration) -> Result<HttpResponse, String>;

    fn requests(&self) -> u64;
}

#[derive(Default)]
pub struct UreqTransport {
    requests: AtomicU64,
}

impl UreqTransport {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Transport for UreqTransport {
    fn post(&self, url: &str, bearer: &str, body: &str, timeout: Duration) -> Result<HttpResponse, String> {
        self.requests.fetch_add(1, Ordering::Relaxed);
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .build()
            .into();
        let mut response = agent
            .post(url)
            .header("Authorization", &format!("Bearer {bearer}"))
            .header("Content-Type", "application/json")
            .send(body)
            .map_err(|e| e.to_string())?;
        let status = response.status().as_u16();
        let body = response.body_mut().read_to_string().map_err(|e| e.to_string())?;
        Ok(HttpResponse { status, body })
    }

    fn requests(&self) -> u64 {
        self.requests.load(Ordering::Relaxed)
    }
}

/// Counts requests and answers them from a fixed queue; the last response
/// repeats once the queue is drained.
pub struct CountingTransport {
    requests: AtomicU64,
    responses: Mutex<Vec<Result<HttpResponse, String>>>,
}

impl CountingTransport {
    pub fn new(responses: Vec<Result<HttpResponse, String>>) -> Self {
        Self {
            requests: AtomicU64::new(0),
            responses: Mutex::new(responses),
        }
    }

    pub fn unreachable() -> Self {
        Self::new(vec![Err("no network".into())])
    }
}

impl Transport for CountingTransport {
    fn post(&self, _: &str, _: &str, _: &str, _: Duration) -> Result<HttpResponse, String> {
        self.requests.fetch_add(1, Ordering::Relaxed);
        let mut queue = self.responses.lock().unwrap();
        if queue.len() > 1 {
            queue.remove(0)
        } else {
            queue.first().cloned().unwrap_or_else(|| Err("no response".into()))
        }
    }

    fn requests(&self) -> u64 {
        self.requests.load(Ordering::Relaxed)
    }
}

#[derive(Deserialize)]
struct Completion {
    choices: Vec<CompletionChoice>,
}

#[derive(Deserialize)]
struct CompletionChoice {
    message: CompletionMessage,
}

#[derive(Deserialize)]
struct CompletionMessage {
    #[serde(default)]
    content: Option<String>,
}

/// Chat-completion client with retry and exponential backoff.
pub struct ChatClient {
    cfg: OracleClientConfig,
    api_key: Option<String>,
    transport: Arc<dyn Transport>,
    calls: AtomicU64,
}

impl ChatClient {
    pub fn new(cfg: OracleClientConfig, api_key: Option<String>, transport: Arc<dyn Transport>) -> Self {
        Self {
            cfg,
            api_key: api_key.filter(|k| !k.is_empty()),
            transport,
            calls: AtomicU64::new(0),
        }
    }

    /// Reads the key from the configured variable. A missing key is an
    /// [`OracleError::Auth`] and no request is made.
    pub fn from_env(cfg: OracleClientConfig, transport: Arc<dyn Transport>) -> Result<Self, OracleError> {
        let key = std::env::var(&cfg.api_key_env).ok().filter(|k| !k.is_empty());
        if key.is_none() {
            return Err(OracleError::Auth(format!("{} is not set", cfg.api_key_env)));
        }
        Ok(Self::new(cfg, key, transport))
    }

    pub fn config(&self) -> &OracleClientConfig {
        &self.cfg
    }

    /// Logical completions requested so far; retries are not counted.
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn transport_requests(&self) -> u64 {
        self.transport.requests()
    }

    /// Returns the content of every choice in the response.
    pub fn complete(&self, user: &str, n: usize) -> Result<Vec<String>, OracleError> {
        let key = self
            .api_key
            .as_deref()
            .ok_or_else(|| OracleError::Auth(format!("{} is not set", self.cfg.api_key_env)))?;
        self.calls.fetch_add(1, Ordering::Relaxed);
        let body = json!({
            "model": self.cfg.model,
            "messages": [
                {"role": "system", "content": SYSTEM_PROMPT},
                {"role": "user", "content": user},
            ],
            "temperature": self.cfg.temperature,
            "n": n.max(1),
        })
        .to_string();
        let url = format!("{}/chat/completions", self.cfg.base_url.trim_end_matches('/'));
        let timeout = Duration::from_millis(self.cfg.timeout_ms.max(1));

        let mut last_error = String::new();
        for attempt in 0..=self.cfg.max_retries {
            if attempt > 0 {
                let delay = self.cfg.backoff_ms.saturating_mul(1 << (attempt - 1).min(16));
                thread::sleep(Duration::from_millis(delay));
            }
            match self.transport.post(&url, key, &body, timeout) {
                Err(e) => last_error = e,
                Ok(r) if r.status == 401 || r.status == 403 => {
                    return Err(OracleError::Auth(format!("HTTP {}", r.status)));
                }
                Ok(r) if r.status == 429 || r.status >= 500 => last_error = format!("HTTP {}", r.status),
                Ok(r) if (200..300).contains(&r.status) => {
                    let parsed: Completion = serde_json::from_str(&r.body)
                        .map_err(|e| OracleError::Unavailable(format!("malformed completion: {e}")))?;
                    return Ok(parsed.choices.into_iter().filter_map(|c| c.message.content).collect());
                }
                Ok(r) => return Err(OracleError::Unavailable(format!("HTTP {}", r.status))),
            }
        }
        Err(OracleError::Unavailable(format!(
            "gave up after {} attempts: {last_error}",
            self.cfg.max_retries + 1
        )))
    }
}

/// Proposal oracle backed by a chat-completion endpoint. One proposal round
/// samples `samples` completions and pools their fenced domains.
pub struct HttpOracle {
    client: Arc<ChatClient>,
    calls: AtomicU64,
}

impl HttpOracle {
    pub fn new(client: Arc<ChatClient>) -> Self {
        Self {
            client,
            calls: AtomicU64::new(0),
        }
    }

    fn complete(&self, prompt: &str, n: usize) -> Result<Vec<String>, OracleError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.client.complete(prompt, n)
    }
}

fn first_block(contents: &[String]) -> Option<String> {
    contents.iter().find_map(|c| {
        fenced_blocks(c)
            .first()
            .map(|b| b.trim().to_string())
            .or_else(|| Some(c.trim().to_string()).filter(|s| !s.is_empty()))
    })
}

impl ProposalOracle for HttpOracle {
    fn propose(&self, ctx: &ProposalContext, k: usize) -> Result<Extraction, OracleError> {
        let contents = self.complete(&build_prompt(ctx), self.client.config().samples)?;
        let mut pooled = Extraction::default();
        let mut seen = std::collections::HashSet::new();
        for content in &contents {
            let part = extract_candidates(content, usize::MAX, Some(&ctx.problem));
            pooled.dropped.extend(part.dropped);
            for d in part.candidates {
                if pooled.candidates.len() < k && seen.insert(print_canonical(&d)) {
                    pooled.candidates.push(d);
                }
            }
        }
        Ok(pooled)
    }

    fn crossover(&self, ctx: &ProposalContext, parent_a: &str, parent_b: &str) -> Result<String, OracleError> {
        let contents = self.complete(&build_crossover_prompt(ctx, parent_a, parent_b), 1)?;
        Ok(first_block(&contents).unwrap_or_else(|| parent_a.to_string()))
    }

    fn mutate(&self, ctx: &ProposalContext, candidate: &str) -> Result<String, OracleError> {
        let contents = self.complete(&build_mutation_prompt(ctx, candidate), 1)?;
        Ok(first_block(&contents).unwrap_or_else(|| candidate.to_string()))
    }

    fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

/// Distance comparator asking the endpoint for `samples` one-letter votes.
/// Replies that are not `A` or `B` are discarded.
pub struct HttpComparator {
    client: Arc<ChatClient>,
    calls: AtomicU64,
}

impl HttpComparator {
    pub fn new(client: Arc<ChatClient>) -> Self {
        Self {
            client,
            calls: AtomicU64::new(0),
        }
    }
}

impl Comparator for HttpComparator {
    fn votes(&self, reference: &str, a: &str, b: &str, samples: usize) -> Result<Vec<Choice>, OracleError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let contents = self
            .client
            .complete(&build_comparison_prompt(reference, a, b), samples)?;
        Ok(contents
            .iter()
            .filter_map(|c| match c.trim().chars().next().map(|ch| ch.to_ascii_uppercase()) {
                Some('A') => Some(Choice::A),
                Some('B') => Some(Choice::B),
                _ => None,
            })
            .collect())
    }

    fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}
