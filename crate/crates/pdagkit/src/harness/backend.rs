//! Chat backends: an engine-backed mock, transcript replay and an
//! OpenAI-style HTTP client.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::prompts::{
    canonical_output, canonical_response, step_instruction, COT_INSTRUCTION, FEW_SHOT_HEADER,
};
use super::{Mode, Reference};
use crate::engine::EngineOptions;
use crate::premise::{parse_hypothesis, parse_premise};

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("backend configuration: {0}")]
    Config(String),
    #[error("request failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("endpoint answered HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed backend response: {0}")]
    Malformed(String),
    #[error("no recorded response for request {0}")]
    ReplayMiss(String),
    #[error("mock backend could not answer: {0}")]
    Mock(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn user(content: impl Into<String>) -> Self {
        Self {
            role: Role::User,
            content: content.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

impl std::ops::AddAssign for Usage {
    fn add_assign(&mut self, o: Self) {
        self.prompt_tokens += o.prompt_tokens;
        self.completion_tokens += o.completion_tokens;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub text: String,
    pub usage: Option<Usage>,
}

pub trait ChatBackend: Send + Sync {
    fn name(&self) -> String;
    fn complete(&self, messages: &[Message]) -> Result<Reply, BackendError>;
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Stable key of a request: SHA-256 over its JSON encoding.
pub fn request_digest(messages: &[Message]) -> String {
    sha256_hex(&serde_json::to_vec(messages).expect("messages serialize"))
}

/// Answers every prompt with the engine's own output, so a pipeline run
/// against it scores perfectly.
#[derive(Debug, Clone, Copy, Default)]
pub struct MockBackend {
    pub options: EngineOptions,
}

impl MockBackend {
    pub fn new(options: EngineOptions) -> Self {
        Self { options }
    }
}

fn last_line_after<'a>(text: &'a str, marker: &str) -> Option<&'a str> {
    let at = text
        .match_indices(marker)
        .filter(|&(i, _)| i == 0 || text.as_bytes()[i - 1] == b'\n')
        .last()?
        .0;
    let rest = &text[at + marker.len()..];
    Some(rest.lines().next().unwrap_or_default().trim())
}

fn detect_mode(prompt: &str) -> Result<(Mode, u8), BackendError> {
    if prompt.starts_with(FEW_SHOT_HEADER) {
        return Ok((Mode::FewShot, 0));
    }
    if prompt.contains(COT_INSTRUCTION) {
        return Ok((Mode::BaselineCot, 0));
    }
    let steps: Vec<u8> = (1..=9).filter(|&k| prompt.contains(step_instruction(k))).collect();
    match steps.as_slice() {
        [k] => Ok((Mode::StepByStep, *k)),
        _ => Err(BackendError::Mock("prompt matches no single step template".into())),
    }
}

impl ChatBackend for MockBackend {
    fn name(&self) -> String {
        "mock".into()
    }

    fn complete(&self, messages: &[Message]) -> Result<Reply, BackendError> {
        let prompt = &messages
            .last()
            .ok_or_else(|| BackendError::Mock("no messages".into()))?
            .content;
        let premise = last_line_after(prompt, "Premise: ")
            .ok_or_else(|| BackendError::Mock("prompt has no premise".into()))?;
        let hyp = last_line_after(prompt, "Hypothesis: ")
            .ok_or_else(|| BackendError::Mock("prompt has no hypothesis".into()))?;
        let doc = parse_premise(premise).map_err(|e| BackendError::Mock(e.to_string()))?;
        let h = parse_hypothesis(hyp, &doc.variables).map_err(|e| BackendError::Mock(e.to_string()))?;
        let r = Reference::build(&doc.variables, &doc.relations, &h, self.options)
            .map_err(|e| BackendError::Mock(e.to_string()))?;
        let text = match detect_mode(prompt)? {
            (Mode::FewShot, _) => canonical_response(&r),
            (Mode::BaselineCot, _) => canonical_output(9, &r),
            (Mode::StepByStep, k) => canonical_output(k, &r),
        };
        Ok(Reply { text, usage: None })
    }
}

/// One request and its recorded response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exchange {
    pub request_digest: String,
    pub response: String,
}

/// Every exchange of one sample run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub sample_id: String,
    pub mode: Mode,
    pub exchanges: Vec<Exchange>,
}

impl Transcript {
    pub fn file_name(&self) -> String {
        format!("{}.{}.json", self.sample_id, self.mode)
    }

    pub fn write_to(&self, dir: &Path) -> Result<(), BackendError> {
        fs::create_dir_all(dir)?;
        let body = serde_json::to_string_pretty(self)?;
        fs::write(dir.join(self.file_name()), body + "\n")?;
        Ok(())
    }
}

/// Serves recorded responses by request digest.
#[derive(Debug, Clone, Default)]
pub struct ReplayBackend {
    responses: HashMap<String, String>,
}

impl ReplayBackend {
    pub fn from_transcripts(transcripts: impl IntoIterator<Item = Transcript>) -> Self {
        let responses = transcripts
            .into_iter()
            .flat_map(|t| t.exchanges)
            .map(|e| (e.request_digest, e.response))
            .collect();
        Self { responses }
    }

    /// Loads every `*.json` transcript in `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self, BackendError> {
        let mut paths: Vec<_> = fs::read_dir(dir)?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<_, _>>()?;
        paths.retain(|p| p.extension().is_some_and(|x| x == "json"));
        paths.sort();
        let mut transcripts = Vec::with_capacity(paths.len());
        for p in paths {
            let t: Transcript = serde_json::from_slice(&fs::read(&p)?).map_err(|e| {
                BackendError::Config(format!("transcript {}: {e}", p.display()))
            })?;
            transcripts.push(t);
        }
        Ok(Self::from_transcripts(transcripts))
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

impl ChatBackend for ReplayBackend {
    fn name(&self) -> String {
        "replay".into()
    }

    fn complete(&self, messages: &[Message]) -> Result<Reply, BackendError> {
        let digest = request_digest(messages);
        self.responses
            .get(&digest)
            .map(|text| Reply {
                text: text.clone(),
                usage: None,
            })
            .ok_or(BackendError::ReplayMiss(digest))
    }
}

/// Settings for [`HttpBackend`]. The bearer token itself never appears
/// here, only the name of the environment variable holding it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HttpConfig {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub max_tokens: Option<u32>,
    pub auth_env: Option<String>,
    pub timeout_secs: u64,
    pub max_retries: u32,
    pub backoff_ms: u64,
    /// Minimum spacing between requests.
    pub min_interval_ms: u64,
}

impl Default for HttpConfig {
    fn default() -> Self {
        Self {
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-4-turbo".into(),
            temperature: 0.0,
            max_tokens: None,
            auth_env: Some("OPENAI_API_KEY".into()),
            timeout_secs: 120,
            max_retries: 3,
            backoff_ms: 500,
            min_interval_ms: 0,
        }
    }
}

pub struct HttpBackend {
    config: HttpConfig,
    url: reqwest::Url,
    token: Option<String>,
    client: reqwest::blocking::Client,
    last_sent: Mutex<Option<Instant>>,
}

impl fmt::Debug for HttpBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HttpBackend")
            .field("config", &self.config)
            .field("token", &self.token.as_ref().map(|_| "<redacted>"))
            .finish()
    }
}

impl HttpBackend {
    /// Validates the endpoint and reads the token before any request.
    pub fn new(config: HttpConfig) -> Result<Self, BackendError> {
        let url = reqwest::Url::parse(&config.endpoint)
            .map_err(|e| BackendError::Config(format!("endpoint `{}`: {e}", config.endpoint)))?;
        if !matches!(url.scheme(), "http" | "https") || url.host_str().is_none() {
            return Err(BackendError::Config(format!(
                "endpoint `{}` must be an http(s) URL with a host",
                config.endpoint
            )));
        }
        if config.model.trim().is_empty() {
            return Err(BackendError::Config("model name is empty".into()));
        }
        let token = match &config.auth_env {
            Some(var) => Some(std::env::var(var).map_err(|_| {
                BackendError::Config(format!("environment variable {var} is not set"))
            })?),
            None => None,
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs.max(1)))
            .build()
            .map_err(|e| BackendError::Config(e.to_string()))?;
        Ok(Self {
            config,
            url,
            token,
            client,
            last_sent: Mutex::new(None),
        })
    }

    pub fn config(&self) -> &HttpConfig {
        &self.config
    }

    fn pace(&self) {
        let gap = Duration::from_millis(self.config.min_interval_ms);
        let mut last = self.last_sent.lock().expect("rate limiter lock");
        if let Some(t) = *last {
            let since = t.elapsed();
            if since < gap {
                thread::sleep(gap - since);
            }
        }
        *last = Some(Instant::now());
    }

    fn body(&self, messages: &[Message]) -> Value {
        let mut body = json!({
            "model": self.config.model,
            "messages": messages,
            "temperature": self.config.temperature,
        });
        if let Some(m) = self.config.max_tokens {
            body["max_tokens"] = json!(m);
        }
        body
    }
}

fn parse_reply(v: &Value) -> Result<Reply, BackendError> {
    let text = v
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .ok_or_else(|| BackendError::Malformed("missing choices[0].message.content".into()))?;
    let usage = v.get("usage").map(|u| Usage {
        prompt_tokens: u.get("prompt_tokens").and_then(Value::as_u64).unwrap_or(0),
        completion_tokens: u.get("completion_tokens").and_then(Value::as_u64).unwrap_or(0),
    });
    Ok(Reply {
        text: text.to_string(),
        usage,
    })
}

impl ChatBackend for HttpBackend {
    fn name(&self) -> String {
        format!("http:{}", self.config.model)
    }

    fn complete(&self, messages: &[Message]) -> Result<Reply, BackendError> {
        let body = self.body(messages);
        let digest = request_digest(messages);
        let attempts = self.config.max_retries + 1;
        let mut last_err = String::new();
        for attempt in 0..attempts {
            if attempt > 0 {
                let wait = self.config.backoff_ms.saturating_mul(1 << (attempt - 1).min(10));
                thread::sleep(Duration::from_millis(wait));
            }
            self.pace();
            log::debug!("request {digest} attempt {}", attempt + 1);
            let mut req = self.client.post(self.url.clone()).json(&body);
            if let Some(t) = &self.token {
                req = req.bearer_auth(t);
            }
            let resp = match req.send() {
                Ok(r) => r,
                Err(e) => {
                    log::warn!("request {digest}: {e}");
                    last_err = e.to_string();
                    continue;
                }
            };
            let status = resp.status();
            let text = resp.text().unwrap_or_default();
            if status.as_u16() == 429 || status.is_server_error() {
                log::warn!("request {digest}: HTTP {status}");
                last_err = format!("HTTP {status}");
                continue;
            }
            if !status.is_success() {
                let body: String = text.chars().take(200).collect();
                return Err(BackendError::Status {
                    status: status.as_u16(),
                    body,
                });
            }
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| BackendError::Malformed(e.to_string()))?;
            let reply = parse_reply(&v)?;
            log::debug!(
                "response {digest} -> {}",
                sha256_hex(reply.text.as_bytes())
            );
            return Ok(reply);
        }
        Err(BackendError::Transport {
            attempts,
            message: last_err,
        })
    }
}
