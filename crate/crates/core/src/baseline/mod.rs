//! Conventional baseline: TF-IDF features fed to a multinomial Naive Bayes classifier.

mod nb;
mod tfidf;

use std::path::PathBuf;

use thiserror::Error;

pub use nb::{fit_nb, predict_nb, NaiveBayesClassifier, NbModel, MODEL_FORMAT_VERSION};
pub use tfidf::{fit_tfidf, tokenize, transform, TfIdfVector, Vocabulary};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("cannot fit a vocabulary: the corpus contains no tokens")]
    NoTokens,
    #[error("class `{0}` has no training examples")]
    MissingClass(String),
    #[error("{vectors} vectors but {labels} labels")]
    LabelCount { vectors: usize, labels: usize },
    #[error("vector dimension {got} does not match the model's {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("smoothing must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("unsupported model format version {0}")]
    FormatVersion(u32),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("model serialization: {0}")]
    Serialize(#[from] serde_json::Error),
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
}
