use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::Serialize;

use super::template::PromptTemplate;
use super::transport::{CompletionRequest, RetryPolicy, TokenBucket, TokenUsage, Transport, TransportError};
use super::verbalizer::{parse_response, Verbalizer};
use super::PromptError;
use crate::corpus::Document;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Parsed {
    Class(String),
    NonResponse,
    /// The request failed after all retries; excluded from metrics like a non-response but
    /// counted separately.
    TransportError(String),
}

impl Parsed {
    pub fn as_log_str(&self) -> &str {
        match self {
            Parsed::Class(c) => c,
            Parsed::NonResponse => "NON_RESPONSE",
            Parsed::TransportError(_) => "TRANSPORT_ERROR",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionOutcome {
    pub doc_id: String,
    pub raw: Option<String>,
    pub parsed: Parsed,
    pub latency_ms: u64,
    pub usage: Option<TokenUsage>,
    pub attempts: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OutcomeCounts {
    pub classified: usize,
    pub non_response: usize,
    pub transport_error: usize,
}

impl OutcomeCounts {
    pub fn tally(outcomes: &[CompletionOutcome]) -> Self {
        let mut c = Self::default();
        for o in outcomes {
            match o.parsed {
                Parsed::Class(_) => c.classified += 1,
                Parsed::NonResponse => c.non_response += 1,
                Parsed::TransportError(_) => c.transport_error += 1,
            }
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyOptions {
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub stop: Vec<String>,
    pub max_in_flight: usize,
    pub retry: RetryPolicy,
    pub rate_limit_per_sec: Option<f64>,
}

impl ClassifyOptions {
    pub fn new(model: impl Into<String>) -> Self {
        let defaults = CompletionRequest::new("", "");
        Self {
            model: model.into(),
            temperature: defaults.temperature,
            max_tokens: defaults.max_tokens,
            stop: defaults.stop,
            max_in_flight: 4,
            retry: RetryPolicy::default(),
            rate_limit_per_sec: None,
        }
    }

    fn request(&self, prompt: String) -> CompletionRequest {
        CompletionRequest {
            model: self.model.clone(),
            prompt,
            temperature: self.temperature,
            max_tokens: self.max_tokens,
            stop: self.stop.clone(),
        }
    }
}

enum Step {
    Done(CompletionOutcome),
    Abort(PromptError),
}

fn classify_one(
    transport: &dyn Transport,
    template: &PromptTemplate,
    verbalizer: &Verbalizer,
    doc: &Document,
    opts: &ClassifyOptions,
    bucket: Option<&TokenBucket>,
) -> Step {
    let prompt = match template.render(doc) {
        Ok(p) => p,
        Err(e) => return Step::Abort(e),
    };
    let request = opts.request(prompt);
    let mut rng = rand::rng();
    let mut attempts = 0;
    loop {
        attempts += 1;
        if let Some(b) = bucket {
            b.acquire();
        }
        let started = Instant::now();
        match transport.complete(&doc.id, &request) {
            Ok(c) => {
                let latency = c.latency.unwrap_or_else(|| started.elapsed());
                let parsed = match parse_response(&c.text, verbalizer) {
                    Some(class) => Parsed::Class(class.to_owned()),
                    None => Parsed::NonResponse,
                };
                return Step::Done(CompletionOutcome {
                    doc_id: doc.id.clone(),
                    raw: Some(c.text),
                    parsed,
                    latency_ms: latency.as_millis() as u64,
                    usage: c.usage,
                    attempts,
                });
            }
            Err(TransportError::Auth(status)) => {
                return Step::Abort(PromptError::Auth(format!("HTTP {status} from completion endpoint")));
            }
            Err(e) if e.is_retryable() && attempts < opts.retry.max_attempts => {
                std::thread::sleep(opts.retry.delay(attempts, &mut rng));
            }
            Err(e) => {
                return Step::Done(CompletionOutcome {
                    doc_id: doc.id.clone(),
                    raw: None,
                    parsed: Parsed::TransportError(e.to_string()),
                    latency_ms: started.elapsed().as_millis() as u64,
                    usage: None,
                    attempts,
                });
            }
        }
    }
}

/// Prompts the model once per document and parses each answer through the verbalizer.
///
/// At most `opts.max_in_flight` requests run concurrently; outcomes come back in input
/// order. An authentication failure aborts the whole run.
pub fn classify_zero_shot(
    transport: &dyn Transport,
    template: &PromptTemplate,
    verbalizer: &Verbalizer,
    docs: &[Document],
    opts: &ClassifyOptions,
) -> Result<Vec<CompletionOutcome>, PromptError> {
    template.validate()?;
    opts.request(String::new()).validate()?;
    if docs.is_empty() {
        return Ok(Vec::new());
    }
    let bucket = opts.rate_limit_per_sec.map(|r| TokenBucket::new(r, 1));
    let workers = opts.max_in_flight.clamp(1, docs.len());
    let next = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let failure: Mutex<Option<PromptError>> = Mutex::new(None);
    let slots: Mutex<Vec<Option<CompletionOutcome>>> = Mutex::new(vec![None; docs.len()]);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if abort.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= docs.len() {
                    break;
                }
                match classify_one(transport, template, verbalizer, &docs[i], opts, bucket.as_ref()) {
                    Step::Done(outcome) => slots.lock().expect("slots lock")[i] = Some(outcome),
                    Step::Abort(e) => {
                        abort.store(true, Ordering::Relaxed);
                        failure.lock().expect("failure lock").get_or_insert(e);
                        break;
                    }
                }
            });
        }
    });

    if let Some(e) = failure.into_inner().expect("failure lock") {
        return Err(e);
    }
    Ok(slots
        .into_inner()
        .expect("slots lock")
        .into_iter()
        .map(|o| o.expect("every document classified"))
        .collect())
}

#[derive(Serialize)]
struct LogLine<'a> {
    id: &'a str,
    raw: Option<&'a str>,
    parsed: &'a str,
    latency_ms: u64,
}

/// Writes `{"id","raw","parsed","latency_ms"}` per outcome.
pub fn write_outcome_log(outcomes: &[CompletionOutcome], path: &Path) -> Result<(), PromptError> {
    let io = |source| PromptError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    for o in outcomes {
        let line = serde_json::to_string(&LogLine {
            id: &o.doc_id,
            raw: o.raw.as_deref(),
            parsed: o.parsed.as_log_str(),
            latency_ms: o.latency_ms,
        })
        .expect("log line serializes");
        writeln!(w, "{line}").map_err(io)?;
    }
    w.flush().map_err(io)
}
