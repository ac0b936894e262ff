//! Weak supervision: labelling functions, the label matrix they produce, coverage and
//! overlap diagnostics, and a weighted label model fitted against gold labels.

mod diagnostics;
mod label_model;
mod lexicon;
mod lf;

use std::path::PathBuf;

use thiserror::Error;

pub use diagnostics::{coverage, diagnose, overlap, overlap_any, write_diagnostics_csv, LfDiagnostic};
pub use label_model::{fit_label_model, fit_label_model_with_history, predict_ws, FitConfig, LabelModel};
pub use lexicon::{alpha_tokens, score_polarity, Lexicon, PolarityScore};
pub use lf::{
    apply_lfs, read_lf_specs, Direction, LabelMatrix, LabelingFunction, LabelingFunctionSpec, LfRule, LfSet,
    Threshold, Vote,
};

#[derive(Debug, Error)]
pub enum WeakSupError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}, line {line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("labelling function `{name}`: {message}")]
    InvalidLf { name: String, message: String },
    #[error("labelling function `{name}`: invalid regular expression: {source}")]
    InvalidRegex {
        name: String,
        #[source]
        source: regex::Error,
    },
    #[error("duplicate labelling function name `{0}`")]
    DuplicateLf(String),
    #[error("unknown labelling function `{0}`")]
    UnknownLf(String),
    #[error("lexicon entry `{word}`: {message}")]
    InvalidLexicon { word: String, message: String },
    #[error("row {0} has no gold label")]
    MissingGold(usize),
    #[error("gold labels cover {gold} rows but the matrix has {rows}")]
    GoldLength { gold: usize, rows: usize },
    #[error("gold labels contain a single class; the class prior is degenerate")]
    SingleClass,
    #[error("vote row has {got} entries but the model has {expected} weights")]
    Dimension { expected: usize, got: usize },
    #[error("invalid fit configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
}
