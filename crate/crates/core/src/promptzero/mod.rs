//! Zero-shot classification through an OpenAI-compatible completion endpoint: prompt
//! rendering, verbalizer parsing with non-response accounting, transports (live, record,
//! replay) and API cost estimation.

mod classify;
mod cost;
mod template;
mod transport;
mod verbalizer;

use std::path::PathBuf;

use thiserror::Error;

pub use classify::{
    classify_zero_shot, write_outcome_log, ClassifyOptions, CompletionOutcome, OutcomeCounts, Parsed,
};
pub use cost::{estimate_cost, CostEstimate, PriceTable, OUTPUT_TOKENS_PER_DOC};
pub use template::PromptTemplate;
pub use transport::{
    Completion, CompletionRequest, LiveTransport, RecordingTransport, ReplayTransport, RetryPolicy,
    TokenBucket, TokenUsage, Transport, TransportError, API_KEY_ENV,
};
pub use verbalizer::{normalize_response, parse_response, Verbalizer};

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("template `{name}` must contain exactly one `{{text}}` placeholder (found {found})")]
    Placeholder { name: String, found: usize },
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("invalid verbalizer: {0}")]
    InvalidVerbalizer(String),
    #[error("invalid completion request: {0}")]
    InvalidRequest(String),
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("no price for model `{0}`")]
    UnknownModel(String),
    #[error("missing API key: set {0}")]
    MissingApiKey(&'static str),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}, line {line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("http client: {0}")]
    Client(String),
}
