//! Chat-completion transports: a live HTTP client and a record/replay
//! cassette keyed by prompt hash.
//!
//! Cassette files are UTF-8 text made of length-prefixed records:
//!
//! ```text
//! cassette v1
//! record 0 <sha256-of-prompt>
//! prompt <byte length>
//! <prompt bytes>
//! response <byte length>
//! <response bytes>
//! ```
//!
//! Each byte block is followed by a single newline.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use sha2::{Digest, Sha256};
use thiserror::Error;

pub const ENV_ENDPOINT: &str = "FLAIR_LLM_ENDPOINT";
pub const ENV_MODEL: &str = "FLAIR_LLM_MODEL";
pub const ENV_KEY: &str = "FLAIR_LLM_KEY";

const CASSETTE_MAGIC: &str = "cassette v1";

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("prompt is empty")]
    EmptyPrompt,
    #[error("request timed out after {0:?}")]
    Timeout(Duration),
    #[error("endpoint returned status {0}")]
    Status(u16),
    #[error("malformed completion payload: {0}")]
    Malformed(String),
    #[error("transport: {0}")]
    Transport(String),
    #[error("no cassette entry for prompt {hash}")]
    CassetteMiss { hash: String },
    #[error("cassette entry {index}: {message}")]
    Cassette { index: usize, message: String },
    #[error("live backend not configured: {0}")]
    NotConfigured(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Anything that turns a prompt into assistant text.
pub trait LlmTransport: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<String, LlmError>;
}

impl<T: LlmTransport + ?Sized> LlmTransport for &T {
    fn complete(&self, prompt: &str) -> Result<String, LlmError> {
        (**self).complete(prompt)
    }
}

impl<T: LlmTransport + ?Sized> LlmTransport for Box<T> {
    fn complete(&self, prompt: &str) -> Result<String, LlmError> {
        (**self).complete(prompt)
    }
}

/// Hex SHA-256 of the prompt bytes.
pub fn prompt_hash(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CassetteEntry {
    pub hash: String,
    pub prompt: String,
    pub response: String,
}

impl CassetteEntry {
    pub fn new(prompt: &str, response: &str) -> Self {
        Self {
            hash: prompt_hash(prompt),
            prompt: prompt.to_string(),
            response: response.to_string(),
        }
    }

    fn render(&self, index: usize) -> String {
        format!(
            "record {index} {}\nprompt {}\n{}\nresponse {}\n{}\n",
            self.hash,
            self.prompt.len(),
            self.prompt,
            self.response.len(),
            self.response
        )
    }
}

pub fn render_cassette(entries: &[CassetteEntry]) -> String {
    let mut out = format!("{CASSETTE_MAGIC}\n");
    for (i, e) in entries.iter().enumerate() {
        out.push_str(&e.render(i));
    }
    out
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn line(&mut self) -> Option<&'a str> {
        if self.pos >= self.text.len() {
            return None;
        }
        let rest = &self.text[self.pos..];
        let end = rest.find('\n').unwrap_or(rest.len());
        self.pos += (end + 1).min(rest.len());
        Some(&rest[..end])
    }

    fn block(&mut self, len: usize) -> Option<&'a str> {
        let rest = self.text.get(self.pos..)?;
        let body = rest.get(..len)?;
        if rest.as_bytes().get(len) != Some(&b'\n') {
            return None;
        }
        self.pos += len + 1;
        Some(body)
    }
}

pub fn parse_cassette(text: &str) -> Result<Vec<CassetteEntry>, LlmError> {
    let mut cur = Cursor { text, pos: 0 };
    if cur.line() != Some(CASSETTE_MAGIC) {
        return Err(LlmError::Cassette {
            index: 0,
            message: format!("missing `{CASSETTE_MAGIC}` header"),
        });
    }
    let mut entries = Vec::new();
    while let Some(line) = cur.line() {
        let index = entries.len();
        let bad = |message: &str| LlmError::Cassette {
            index,
            message: message.to_string(),
        };
        if line.is_empty() && cur.pos >= text.len() {
            break;
        }
        let mut head = line.split(' ');
        let (Some("record"), Some(idx), Some(hash), None) = (head.next(), head.next(), head.next(), head.next()) else {
            return Err(bad("expected `record <index> <hash>`"));
        };
        if idx.parse::<usize>().ok() != Some(index) {
            return Err(bad("record index out of sequence"));
        }
        let mut field = |name: &str| -> Result<String, LlmError> {
            let header = cur.line().ok_or_else(|| bad("truncated record"))?;
            let len = header
                .strip_prefix(name)
                .and_then(|r| r.strip_prefix(' '))
                .and_then(|n| n.parse::<usize>().ok())
                .ok_or_else(|| bad(&format!("expected `{name} <length>`")))?;
            cur.block(len)
                .map(str::to_string)
                .ok_or_else(|| bad(&format!("{name} shorter than its declared length")))
        };
        let prompt = field("prompt")?;
        let response = field("response")?;
        if prompt_hash(&prompt) != hash {
            return Err(bad("hash does not match prompt"));
        }
        entries.push(CassetteEntry {
            hash: hash.to_string(),
            prompt,
            response,
        });
    }
    Ok(entries)
}

pub fn load_cassette(path: impl AsRef<Path>) -> Result<Vec<CassetteEntry>, LlmError> {
    parse_cassette(&fs::read_to_string(path)?)
}

/// Serves stored responses. On a miss, strict mode fails; otherwise the
/// prompt is forwarded to the fallback transport, if one is set.
pub struct ReplayTransport {
    responses: HashMap<String, String>,
    strict: bool,
    fallback: Option<Box<dyn LlmTransport>>,
}

impl ReplayTransport {
    pub fn new(entries: impl IntoIterator<Item = CassetteEntry>, strict: bool) -> Self {
        Self {
            responses: entries.into_iter().map(|e| (e.hash, e.response)).collect(),
            strict,
            fallback: None,
        }
    }

    pub fn from_files(paths: &[PathBuf], strict: bool) -> Result<Self, LlmError> {
        let mut entries = Vec::new();
        for p in paths {
            entries.extend(load_cassette(p)?);
        }
        Ok(Self::new(entries, strict))
    }

    pub fn with_fallback(mut self, fallback: Box<dyn LlmTransport>) -> Self {
        self.fallback = Some(fallback);
        self
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

impl LlmTransport for ReplayTransport {
    fn complete(&self, prompt: &str) -> Result<String, LlmError> {
        if prompt.is_empty() {
            return Err(LlmError::EmptyPrompt);
        }
        let hash = prompt_hash(prompt);
        if let Some(r) = self.responses.get(&hash) {
            return Ok(r.clone());
        }
        match (&self.fallback, self.strict) {
            (Some(fallback), false) => fallback.complete(prompt),
            _ => Err(LlmError::CassetteMiss { hash }),
        }
    }
}

/// Forwards to `inner` and appends every exchange to a cassette file.
pub struct Recorder<T> {
    inner: T,
    path: PathBuf,
    next_index: Mutex<usize>,
}

impl<T: LlmTransport> Recorder<T> {
    /// Opens (or creates) the cassette, continuing its record numbering.
    pub fn open(inner: T, path: impl Into<PathBuf>) -> Result<Self, LlmError> {
        let path = path.into();
        let next = if path.exists() {
            load_cassette(&path)?.len()
        } else {
            fs::write(&path, format!("{CASSETTE_MAGIC}\n"))?;
            0
        };
        Ok(Self {
            inner,
            path,
            next_index: Mutex::new(next),
        })
    }

    pub fn record(&self, prompt: &str) -> Result<String, LlmError> {
        let response = self.inner.complete(prompt)?;
        let mut next = self.next_index.lock().expect("recorder lock poisoned");
        let entry = CassetteEntry::new(prompt, &response);
        let mut file = fs::OpenOptions::new().append(true).open(&self.path)?;
        file.write_all(entry.render(*next).as_bytes())?;
        *next += 1;
        Ok(response)
    }
}

impl<T: LlmTransport> LlmTransport for Recorder<T> {
    fn complete(&self, prompt: &str) -> Result<String, LlmError> {
        self.record(prompt)
    }
}

/// Live chat-completion backend: one user message, temperature 0.
#[derive(Clone)]
pub struct LiveClient {
    pub endpoint: String,
    pub model: String,
    key: Option<String>,
    pub timeout: Duration,
}

impl std::fmt::Debug for LiveClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LiveClient")
            .field("endpoint", &self.endpoint)
            .field("model", &self.model)
            .field("key", &self.key.as_ref().map(|_| "<redacted>"))
            .field("timeout", &self.timeout)
            .finish()
    }
}

impl LiveClient {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>, key: Option<String>, timeout: Duration) -> Self {
        Self {
            endpoint: endpoint.into(),
            model: model.into(),
            key,
            timeout,
        }
    }

    /// Reads endpoint, model and key from the environment; explicit values win.
    pub fn from_env(endpoint: Option<String>, model: Option<String>, timeout: Duration) -> Result<Self, LlmError> {
        let endpoint = endpoint
            .or_else(|| std::env::var(ENV_ENDPOINT).ok())
            .ok_or_else(|| LlmError::NotConfigured(format!("set {ENV_ENDPOINT} or pass an endpoint")))?;
        let model = model
            .or_else(|| std::env::var(ENV_MODEL).ok())
            .unwrap_or_else(|| "gpt-4o".to_string());
        let key = std::env::var(ENV_KEY).ok().filter(|k| !k.is_empty());
        Ok(Self::new(endpoint, model, key, timeout))
    }

    pub fn request_body(&self, prompt: &str) -> serde_json::Value {
        serde_json::json!({
            "model": self.model,
            "temperature": 0,
            "n": 1,
            "messages": [{"role": "user", "content": prompt}],
        })
    }
}

/// Pulls `choices[0].message.content` out of a chat-completion response.
pub fn extract_completion(body: &serde_json::Value) -> Result<String, LlmError> {
    body.get("choices")
        .and_then(|c| c.get(0))
        .and_then(|c| c.get("message"))
        .and_then(|m| m.get("content"))
        .and_then(|c| c.as_str())
        .map(str::to_string)
        .ok_or_else(|| LlmError::Malformed("missing choices[0].message.content".into()))
}

#[cfg(feature = "live")]
impl LlmTransport for LiveClient {
    fn complete(&self, prompt: &str) -> Result<String, LlmError> {
        if prompt.is_empty() {
            return Err(LlmError::EmptyPrompt);
        }
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        let mut req = agent.post(&self.endpoint).header("Content-Type", "application/json");
        if let Some(key) = &self.key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req
            .send(self.request_body(prompt).to_string().as_bytes())
            .map_err(|e| match e {
                ureq::Error::Timeout(_) => LlmError::Timeout(self.timeout),
                other => LlmError::Transport(other.to_string()),
            })?;
        let status = resp.status().as_u16();
        if !(200..300).contains(&status) {
            return Err(LlmError::Status(status));
        }
        let text = resp.body_mut().read_to_string().map_err(|e| match e {
            ureq::Error::Timeout(_) => LlmError::Timeout(self.timeout),
            other => LlmError::Transport(other.to_string()),
        })?;
        let body: serde_json::Value = serde_json::from_str(&text).map_err(|e| LlmError::Malformed(e.to_string()))?;
        extract_completion(&body)
    }
}

#[cfg(not(feature = "live"))]
impl LlmTransport for LiveClient {
    fn complete(&self, _prompt: &str) -> Result<String, LlmError> {
        Err(LlmError::NotConfigured("built without the `live` feature".into()))
    }
}

/// In-memory transport answering from a closure; handy for tests and for
/// authoring cassettes with a scripted responder.
pub struct FnTransport<F>(pub F);

impl<F> LlmTransport for FnTransport<F>
where
    F: Fn(&str) -> Result<String, LlmError> + Send + Sync,
{
    fn complete(&self, prompt: &str) -> Result<String, LlmError> {
        if prompt.is_empty() {
            return Err(LlmError::EmptyPrompt);
        }
        (self.0)(prompt)
    }
}
