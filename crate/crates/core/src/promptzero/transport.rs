use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::PromptError;

pub const API_KEY_ENV: &str = "CHEAPLEARN_API_KEY";

/// Decoding settings sent with every prompt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub model: String,
    pub prompt: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub stop: Vec<String>,
}

impl CompletionRequest {
    pub const DEFAULT_TEMPERATURE: f64 = 0.1;
    pub const DEFAULT_MAX_TOKENS: u32 = 20;

    pub fn new(model: impl Into<String>, prompt: impl Into<String>) -> Self {
        Self {
            model: model.into(),
            prompt: prompt.into(),
            temperature: Self::DEFAULT_TEMPERATURE,
            max_tokens: Self::DEFAULT_MAX_TOKENS,
            stop: vec![".".to_owned(), ",".to_owned()],
        }
    }

    pub fn validate(&self) -> Result<(), PromptError> {
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(PromptError::InvalidRequest(format!("temperature {} < 0", self.temperature)));
        }
        if self.max_tokens < 1 {
            return Err(PromptError::InvalidRequest("max_tokens must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub text: String,
    pub usage: Option<TokenUsage>,
    /// Set by transports that know the latency better than wall-clock timing (replay: zero).
    pub latency: Option<Duration>,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TransportError {
    #[error("authentication rejected (HTTP {0})")]
    Auth(u16),
    #[error("request timed out")]
    Timeout,
    #[error("HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("network error: {0}")]
    Network(String),
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("no replay entry for document `{0}`")]
    MissingFixture(String),
}

impl TransportError {
    pub fn is_retryable(&self) -> bool {
        match self {
            TransportError::Timeout | TransportError::Network(_) => true,
            TransportError::Http { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

/// Source of completions. Implementations must be shareable across worker threads.
pub trait Transport: Send + Sync {
    fn complete(&self, doc_id: &str, request: &CompletionRequest) -> Result<Completion, TransportError>;

    /// Number of network requests issued so far.
    fn live_calls(&self) -> usize;
}

/// Serves responses from a fixture keyed by document id; never touches the network.
#[derive(Debug, Default)]
pub struct ReplayTransport {
    responses: HashMap<String, String>,
    served: AtomicUsize,
}

#[derive(Deserialize, Serialize)]
struct FixtureLine {
    id: String,
    response: String,
}

impl ReplayTransport {
    pub fn new(responses: HashMap<String, String>) -> Self {
        Self {
            responses,
            served: AtomicUsize::new(0),
        }
    }

    /// Reads a JSON Lines fixture of `{"id": ..., "response": ...}` objects.
    pub fn from_path(path: &Path) -> Result<Self, PromptError> {
        let file = File::open(path).map_err(|source| PromptError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut responses = HashMap::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| PromptError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: FixtureLine = serde_json::from_str(&line).map_err(|e| PromptError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
            responses.insert(rec.id, rec.response);
        }
        Ok(Self::new(responses))
    }

    pub fn served(&self) -> usize {
        self.served.load(Ordering::Relaxed)
    }
}

impl Transport for ReplayTransport {
    fn complete(&self, doc_id: &str, _request: &CompletionRequest) -> Result<Completion, TransportError> {
        let text = self
            .responses
            .get(doc_id)
            .ok_or_else(|| TransportError::MissingFixture(doc_id.to_owned()))?;
        self.served.fetch_add(1, Ordering::Relaxed);
        Ok(Completion {
            text: text.clone(),
            usage: None,
            latency: Some(Duration::ZERO),
        })
    }

    fn live_calls(&self) -> usize {
        0
    }
}

/// Passes requests to `inner` and appends every successful response to a replay fixture.
pub struct RecordingTransport<T> {
    inner: T,
    sink: Mutex<BufWriter<File>>,
}

impl<T: Transport> RecordingTransport<T> {
    pub fn create(inner: T, fixture: &Path) -> Result<Self, PromptError> {
        let file = File::create(fixture).map_err(|source| PromptError::Io {
            path: fixture.to_path_buf(),
            source,
        })?;
        Ok(Self {
            inner,
            sink: Mutex::new(BufWriter::new(file)),
        })
    }

    pub fn flush(&self) -> std::io::Result<()> {
        self.sink.lock().expect("recorder lock").flush()
    }
}

impl<T: Transport> Transport for RecordingTransport<T> {
    fn complete(&self, doc_id: &str, request: &CompletionRequest) -> Result<Completion, TransportError> {
        let completion = self.inner.complete(doc_id, request)?;
        let line = serde_json::to_string(&FixtureLine {
            id: doc_id.to_owned(),
            response: completion.text.clone(),
        })
        .map_err(|e| TransportError::Malformed(e.to_string()))?;
        let mut sink = self.sink.lock().expect("recorder lock");
        writeln!(sink, "{line}").map_err(|e| TransportError::Network(format!("recording failed: {e}")))?;
        Ok(completion)
    }

    fn live_calls(&self) -> usize {
        self.inner.live_calls()
    }
}

impl<T> Drop for RecordingTransport<T> {
    fn drop(&mut self) {
        if let Ok(sink) = self.sink.get_mut() {
            let _ = sink.flush();
        }
    }
}

/// HTTP client for OpenAI-compatible `chat/completions` (or legacy `completions`) endpoints.
pub struct LiveTransport {
    client: reqwest::blocking::Client,
    endpoint: String,
    api_key: String,
    chat: bool,
    calls: AtomicUsize,
}

impl LiveTransport {
    /// `endpoint` is the full URL; paths ending in `/completions` but not `/chat/completions`
    /// use the legacy prompt body.
    pub fn new(endpoint: impl Into<String>, api_key: impl Into<String>, timeout: Duration) -> Result<Self, PromptError> {
        let endpoint = endpoint.into();
        let chat = !(endpoint.trim_end_matches('/').ends_with("/completions")
            && !endpoint.trim_end_matches('/').ends_with("/chat/completions"));
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| PromptError::Client(e.to_string()))?;
        Ok(Self {
            client,
            endpoint,
            api_key: api_key.into(),
            chat,
            calls: AtomicUsize::new(0),
        })
    }

    pub fn from_env(endpoint: impl Into<String>, timeout: Duration) -> Result<Self, PromptError> {
        let key = std::env::var(API_KEY_ENV)
            .ok()
            .filter(|k| !k.is_empty())
            .ok_or(PromptError::MissingApiKey(API_KEY_ENV))?;
        Self::new(endpoint, key, timeout)
    }

    fn body(&self, request: &CompletionRequest) -> Value {
        let mut body = json!({
            "model": request.model,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
            "stop": request.stop,
        });
        if self.chat {
            body["messages"] = json!([{"role": "user", "content": request.prompt}]);
        } else {
            body["prompt"] = json!(request.prompt);
        }
        body
    }
}

fn parse_completion(v: &Value) -> Result<Completion, TransportError> {
    let choice = v
        .get("choices")
        .and_then(|c| c.get(0))
        .ok_or_else(|| TransportError::Malformed("no choices".into()))?;
    let text = choice
        .pointer("/message/content")
        .or_else(|| choice.get("text"))
        .and_then(Value::as_str)
        .ok_or_else(|| TransportError::Malformed("choice carries no text".into()))?;
    let usage = v.get("usage").and_then(|u| {
        Some(TokenUsage {
            prompt_tokens: u.get("prompt_tokens")?.as_u64()?,
            completion_tokens: u.get("completion_tokens")?.as_u64()?,
        })
    });
    Ok(Completion {
        text: text.to_owned(),
        usage,
        latency: None,
    })
}

impl Transport for LiveTransport {
    fn complete(&self, _doc_id: &str, request: &CompletionRequest) -> Result<Completion, TransportError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let response = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .json(&self.body(request))
            .send()
            .map_err(|e| {
                if e.is_timeout() {
                    TransportError::Timeout
                } else {
                    TransportError::Network(e.to_string())
                }
            })?;
        let status = response.status().as_u16();
        if status == 401 || status == 403 {
            return Err(TransportError::Auth(status));
        }
        let text = response.text().map_err(|e| {
            if e.is_timeout() {
                TransportError::Timeout
            } else {
                TransportError::Network(e.to_string())
            }
        })?;
        if !(200..300).contains(&status) {
            return Err(TransportError::Http { status, body: text });
        }
        let v: Value = serde_json::from_str(&text).map_err(|e| TransportError::Malformed(e.to_string()))?;
        parse_completion(&v)
    }

    fn live_calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }
}

/// Exponential backoff with proportional jitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay_ms: u64,
    pub max_delay_ms: u64,
    /// Each delay is scaled by a uniform factor in `[1 - jitter, 1 + jitter]`.
    pub jitter: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            base_delay_ms: 500,
            max_delay_ms: 8_000,
            jitter: 0.25,
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `retry` (1-based).
    pub fn delay(&self, retry: u32, rng: &mut impl Rng) -> Duration {
        let exp = self.base_delay_ms.saturating_mul(1u64 << (retry.saturating_sub(1)).min(20));
        let capped = exp.min(self.max_delay_ms) as f64;
        let j = self.jitter.clamp(0.0, 1.0);
        let factor = if j > 0.0 { rng.random_range(1.0 - j..=1.0 + j) } else { 1.0 };
        Duration::from_millis((capped * factor).round() as u64)
    }
}

/// Token bucket limiting request starts to `rate` per second with bursts up to `burst`.
#[derive(Debug)]
pub struct TokenBucket {
    rate: f64,
    burst: f64,
    state: Mutex<(f64, Instant)>,
}

impl TokenBucket {
    pub fn new(rate_per_sec: f64, burst: u32) -> Self {
        let burst = f64::from(burst.max(1));
        Self {
            rate: rate_per_sec.max(f64::MIN_POSITIVE),
            burst,
            state: Mutex::new((burst, Instant::now())),
        }
    }

    /// Blocks until a token is available, then consumes it.
    pub fn acquire(&self) {
        loop {
            let wait = {
                let mut state = self.state.lock().expect("bucket lock");
                let now = Instant::now();
                let refill = now.duration_since(state.1).as_secs_f64() * self.rate;
                state.0 = (state.0 + refill).min(self.burst);
                state.1 = now;
                if state.0 >= 1.0 {
                    state.0 -= 1.0;
                    return;
                }
                (1.0 - state.0) / self.rate
            };
            std::thread::sleep(Duration::from_secs_f64(wait));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{Read, Write};
    use std::net::TcpListener;
    use std::sync::Arc;

    /// Minimal HTTP server answering each connection with the next canned (status, body).
    fn serve(responses: Vec<(u16, String)>) -> (String, Arc<Mutex<Vec<String>>>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let seen = Arc::new(Mutex::new(Vec::new()));
        let seen2 = Arc::clone(&seen);
        std::thread::spawn(move || {
            for (status, body) in responses {
                let (mut stream, _) = listener.accept().unwrap();
                let mut buf = Vec::new();
                let mut chunk = [0u8; 4096];
                loop {
                    let n = stream.read(&mut chunk).unwrap();
                    buf.extend_from_slice(&chunk[..n]);
                    let text = String::from_utf8_lossy(&buf);
                    if let Some(split) = text.find("\r\n\r\n") {
                        let len = text[..split]
                            .lines()
                            .find_map(|l| {
                                let l = l.to_ascii_lowercase();
                                l.strip_prefix("content-length:").map(|v| v.trim().parse::<usize>().unwrap())
                            })
                            .unwrap_or(0);
                        if buf.len() >= split + 4 + len {
                            seen2.lock().unwrap().push(text[split + 4..].to_string());
                            break;
                        }
                    }
                    if n == 0 {
                        break;
                    }
                }
                let reply = format!(
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                );
                stream.write_all(reply.as_bytes()).unwrap();
            }
        });
        (format!("http://{addr}/v1/chat/completions"), seen)
    }

    fn chat_body(text: &str) -> String {
        json!({"choices":[{"message":{"role":"assistant","content":text}}],"usage":{"prompt_tokens":12,"completion_tokens":1}})
            .to_string()
    }

    #[test]
    fn request_defaults() {
        let r = CompletionRequest::new("gpt-4", "p");
        assert_eq!(r.temperature, 0.1);
        assert_eq!(r.max_tokens, 20);
        assert_eq!(r.stop, [".", ","]);
        r.validate().unwrap();
        assert!(CompletionRequest { temperature: -0.1, ..r.clone() }.validate().is_err());
        assert!(CompletionRequest { max_tokens: 0, ..r }.validate().is_err());
    }

    #[test]
    fn live_chat_request_shape() {
        let (url, seen) = serve(vec![(200, chat_body("Yes"))]);
        let t = LiveTransport::new(url, "k", Duration::from_secs(5)).unwrap();
        let c = t.complete("d1", &CompletionRequest::new("gpt-4", "hello")).unwrap();
        assert_eq!(c.text, "Yes");
        assert_eq!(c.usage.unwrap().prompt_tokens, 12);
        assert_eq!(t.live_calls(), 1);
        let body: Value = serde_json::from_str(&seen.lock().unwrap()[0]).unwrap();
        assert_eq!(body["model"], "gpt-4");
        assert_eq!(body["temperature"], 0.1);
        assert_eq!(body["max_tokens"], 20);
        assert_eq!(body["stop"], json!([".", ","]));
        assert_eq!(body["messages"][0]["content"], "hello");
    }

    #[test]
    fn live_status_mapping() {
        let (url, _) = serve(vec![(401, "{}".into()), (503, "busy".into()), (400, "bad".into())]);
        let t = LiveTransport::new(url, "k", Duration::from_secs(5)).unwrap();
        let req = CompletionRequest::new("m", "p");
        assert_eq!(t.complete("a", &req).unwrap_err(), TransportError::Auth(401));
        let busy = t.complete("a", &req).unwrap_err();
        assert!(busy.is_retryable());
        let bad = t.complete("a", &req).unwrap_err();
        assert!(!bad.is_retryable());
    }

    #[test]
    fn legacy_completions_body() {
        let (url, seen) = serve(vec![(200, json!({"choices":[{"text":" No"}]}).to_string())]);
        let url = url.replace("/chat/completions", "/completions");
        let t = LiveTransport::new(url, "k", Duration::from_secs(5)).unwrap();
        assert_eq!(t.complete("a", &CompletionRequest::new("m", "p")).unwrap().text, " No");
        let body: Value = serde_json::from_str(&seen.lock().unwrap()[0]).unwrap();
        assert_eq!(body["prompt"], "p");
    }

    #[test]
    fn replay_and_record() {
        let dir = tempfile::tempdir().unwrap();
        let fixture = dir.path().join("rec.jsonl");
        let mut map = HashMap::new();
        map.insert("a".to_owned(), "Yes".to_owned());
        {
            let rec = RecordingTransport::create(ReplayTransport::new(map), &fixture).unwrap();
            rec.complete("a", &CompletionRequest::new("m", "p")).unwrap();
            assert!(matches!(
                rec.complete("zz", &CompletionRequest::new("m", "p")),
                Err(TransportError::MissingFixture(_))
            ));
        }
        let replay = ReplayTransport::from_path(&fixture).unwrap();
        let c = replay.complete("a", &CompletionRequest::new("m", "p")).unwrap();
        assert_eq!(c.text, "Yes");
        assert_eq!(replay.live_calls(), 0);
        assert_eq!(replay.served(), 1);
    }

    #[test]
    fn backoff_grows_and_caps() {
        let p = RetryPolicy {
            jitter: 0.0,
            ..RetryPolicy::default()
        };
        let mut rng = rand::rng();
        assert_eq!(p.delay(1, &mut rng), Duration::from_millis(500));
        assert_eq!(p.delay(2, &mut rng), Duration::from_millis(1000));
        assert_eq!(p.delay(10, &mut rng), Duration::from_millis(8000));
        let j = RetryPolicy::default();
        let d = j.delay(1, &mut rng).as_millis();
        assert!((375..=625).contains(&d));
    }

    #[test]
    fn token_bucket_paces() {
        let bucket = TokenBucket::new(200.0, 1);
        let start = Instant::now();
        for _ in 0..5 {
            bucket.acquire();
        }
        // First token is immediate; four more at 5 ms each.
        assert!(start.elapsed() >= Duration::from_millis(15));
    }
}
