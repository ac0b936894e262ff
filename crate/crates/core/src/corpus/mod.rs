//! Labelled corpora: loading, validation and the deterministic splits and
//! budget-indexed subsets used by the benchmark harness.

mod io;
mod manifest;
mod sampling;

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{ingest, read_corpus_jsonl, write_corpus_csv, write_corpus_jsonl, CorpusFormat};
pub use manifest::{ids_digest, write_split_artifacts, SplitEntry, SplitManifest};
pub use sampling::{
    balance_classes, build_budget_series, carve_exploration, seeded_rng, stratified_sample,
    BalanceMode, SamplingPlan,
};

/// Labels reserved for non-class outcomes elsewhere in the pipeline.
pub const RESERVED_LABELS: [&str; 3] = ["ABSTAIN", "NON_RESPONSE", "TRANSPORT_ERROR"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate document id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: unknown class `{value}`")]
    UnknownClass { line: usize, value: String },
    #[error("line {line}: document `{id}` has empty text")]
    EmptyText { line: usize, id: String },
    #[error("document `{0}` has no gold label")]
    Unlabelled(String),
    #[error("invalid class set: {0}")]
    InvalidClassSet(String),
    #[error("fraction must lie in (0, 1], got {0}")]
    InvalidFraction(f64),
    #[error("invalid sampling plan: {0}")]
    InvalidPlan(String),
    #[error("class `{class}` has {available} documents but {needed} are required (short by {shortfall})")]
    Insufficient {
        class: String,
        needed: usize,
        available: usize,
        shortfall: usize,
    },
    #[error("cannot carve {requested} exploration documents from a corpus of {available}")]
    ExplorationTooLarge { requested: usize, available: usize },
    #[error("splits overlap on document `{0}`")]
    Overlap(String),
    #[error("serialization error: {0}")]
    Serialize(String),
}

/// Ordered pair of class ids; index 0 is the negative class, index 1 the positive one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct ClassSet {
    labels: [String; 2],
}

impl ClassSet {
    pub fn binary(negative: impl Into<String>, positive: impl Into<String>) -> Result<Self, CorpusError> {
        let negative = negative.into();
        let positive = positive.into();
        for label in [&negative, &positive] {
            if label.trim().is_empty() {
                return Err(CorpusError::InvalidClassSet("class ids must be non-empty".into()));
            }
            if RESERVED_LABELS.contains(&label.as_str()) {
                return Err(CorpusError::InvalidClassSet(format!("`{label}` is reserved")));
            }
        }
        if negative == positive {
            return Err(CorpusError::InvalidClassSet(format!("duplicate class `{negative}`")));
        }
        Ok(Self {
            labels: [negative, positive],
        })
    }

    pub fn negative(&self) -> &str {
        &self.labels[0]
    }

    pub fn positive(&self) -> &str {
        &self.labels[1]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index_of(label).is_some()
    }
}

impl TryFrom<Vec<String>> for ClassSet {
    type Error = CorpusError;

    fn try_from(v: Vec<String>) -> Result<Self, Self::Error> {
        match <[String; 2]>::try_from(v) {
            Ok([neg, pos]) => Self::binary(neg, pos),
            Err(v) => Err(CorpusError::InvalidClassSet(format!(
                "expected exactly 2 classes, got {}",
                v.len()
            ))),
        }
    }
}

impl From<ClassSet> for Vec<String> {
    fn from(c: ClassSet) -> Self {
        c.labels.into()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub gold_label: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, gold_label: Option<&str>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            gold_label: gold_label.map(str::to_owned),
            meta: BTreeMap::new(),
        }
    }

    /// Length in Unicode scalar values.
    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    name: String,
    class_set: ClassSet,
    documents: Vec<Document>,
}

impl Corpus {
    /// Validates id uniqueness, non-empty text and that every gold label is a known class.
    pub fn new(name: impl Into<String>, class_set: ClassSet, documents: Vec<Document>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(documents.len());
        for (i, doc) in documents.iter().enumerate() {
            let line = i + 1;
            if !seen.insert(doc.id.as_str()) {
                return Err(CorpusError::DuplicateId { line, id: doc.id.clone() });
            }
            if doc.text.trim().is_empty() {
                return Err(CorpusError::EmptyText { line, id: doc.id.clone() });
            }
            if let Some(label) = &doc.gold_label {
                if !class_set.contains(label) {
                    return Err(CorpusError::UnknownClass { line, value: label.clone() });
                }
            }
        }
        Ok(Self {
            name: name.into(),
            class_set,
            documents,
        })
    }

    pub(crate) fn from_validated(name: String, class_set: ClassSet, documents: Vec<Document>) -> Self {
        Self {
            name,
            class_set,
            documents,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn class_set(&self) -> &ClassSet {
        &self.class_set
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().map(|d| d.id.as_str())
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    /// Gold class index per document (0 = negative, 1 = positive).
    pub fn gold_indices(&self) -> Result<Vec<usize>, CorpusError> {
        self.documents
            .iter()
            .map(|d| {
                d.gold_label
                    .as_deref()
                    .and_then(|l| self.class_set.index_of(l))
                    .ok_or_else(|| CorpusError::Unlabelled(d.id.clone()))
            })
            .collect()
    }

    /// Document counts per class index; unlabelled documents are not counted.
    pub fn class_counts(&self) -> [usize; 2] {
        let mut counts = [0; 2];
        for d in &self.documents {
            if let Some(i) = d.gold_label.as_deref().and_then(|l| self.class_set.index_of(l)) {
                counts[i] += 1;
            }
        }
        counts
    }

    /// Keeps the documents at `indices`, in corpus order.
    pub fn select(&self, name: impl Into<String>, indices: &[usize]) -> Corpus {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let documents = sorted.into_iter().map(|i| self.documents[i].clone()).collect();
        Corpus::from_validated(name.into(), self.class_set.clone(), documents)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Corpus {
        self.name = name.into();
        self
    }

    /// Character-length summary per class, plus the overall row under `"All"`.
    pub fn length_stats(&self) -> Vec<LengthStats> {
        let mut groups: Vec<(String, Vec<usize>)> = vec![("All".to_owned(), Vec::new())];
        for label in self.class_set.labels() {
            groups.push((label.clone(), Vec::new()));
        }
        for d in &self.documents {
            let n = d.char_len();
            groups[0].1.push(n);
            if let Some(i) = d.gold_label.as_deref().and_then(|l| self.class_set.index_of(l)) {
                groups[i + 1].1.push(n);
            }
        }
        groups
            .into_iter()
            .map(|(label, mut lens)| {
                lens.sort_unstable();
                LengthStats::from_sorted(label, &lens)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthStats {
    pub label: String,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub max: usize,
    pub min: usize,
}

impl LengthStats {
    fn from_sorted(label: String, lens: &[usize]) -> Self {
        let count = lens.len();
        if count == 0 {
            return Self { label, count, mean: 0.0, median: 0.0, max: 0, min: 0 };
        }
        let mean = lens.iter().sum::<usize>() as f64 / count as f64;
        let median = if count % 2 == 1 {
            lens[count / 2] as f64
        } else {
            (lens[count / 2 - 1] + lens[count / 2]) as f64 / 2.0
        };
        Self {
            label,
            count,
            mean,
            median,
            max: lens[count - 1],
            min: lens[0],
        }
    }
}

/// Train/development/test/exploration partition of a dataset.
#[derive(Debug, Clone)]
pub struct CorpusSplits {
    pub train: Corpus,
    pub development: Corpus,
    pub test: Corpus,
    pub exploration: Corpus,
}

impl CorpusSplits {
    /// Fails on the first document id shared by two splits.
    pub fn check_disjoint(&self) -> Result<(), CorpusError> {
        let mut seen = HashSet::new();
        for part in [&self.train, &self.development, &self.test, &self.exploration] {
            for id in part.ids() {
                if !seen.insert(id) {
                    return Err(CorpusError::Overlap(id.to_owned()));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) fn test_corpus(name: &str, labels: &[&str]) -> Corpus {
    let classes = ClassSet::binary("neg", "pos").unwrap();
    let docs = labels
        .iter()
        .enumerate()
        .map(|(i, l)| Document::new(format!("d{i}"), format!("text {i}"), Some(l)))
        .collect();
    Corpus::new(name, classes, docs).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_set_rules() {
        assert!(ClassSet::binary("a", "a").is_err());
        assert!(ClassSet::binary("", "a").is_err());
        assert!(ClassSet::binary("NON_RESPONSE", "a").is_err());
        assert!(ClassSet::try_from(vec!["a".to_owned()]).is_err());
        let c = ClassSet::binary("not_abuse", "abuse").unwrap();
        assert_eq!(c.positive(), "abuse");
        assert_eq!(c.index_of("not_abuse"), Some(0));
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, r#"["not_abuse","abuse"]"#);
    }

    #[test]
    fn corpus_validation() {
        let c = ClassSet::binary("neg", "pos").unwrap();
        let dup = vec![Document::new("a", "x", None), Document::new("a", "y", None)];
        assert!(matches!(
            Corpus::new("t", c.clone(), dup),
            Err(CorpusError::DuplicateId { line: 2, .. })
        ));
        let blank = vec![Document::new("a", "   ", None)];
        assert!(matches!(Corpus::new("t", c.clone(), blank), Err(CorpusError::EmptyText { .. })));
        let unknown = vec![Document::new("a", "x", Some("maybe"))];
        assert!(matches!(
            Corpus::new("t", c, unknown),
            Err(CorpusError::UnknownClass { value, .. }) if value == "maybe"
        ));
    }

    #[test]
    fn length_stats_per_class() {
        let c = ClassSet::binary("neg", "pos").unwrap();
        let docs = vec![
            Document::new("a", "abcd", Some("pos")),
            Document::new("b", "ab", Some("neg")),
            Document::new("c", "abcdef", Some("pos")),
        ];
        let stats = Corpus::new("t", c, docs).unwrap().length_stats();
        assert_eq!(stats[0].count, 3);
        assert_eq!(stats[0].mean, 4.0);
        assert_eq!(stats[0].median, 4.0);
        assert_eq!(stats[2].label, "pos");
        assert_eq!(stats[2].median, 5.0);
        assert_eq!((stats[1].min, stats[1].max), (2, 2));
    }

    #[test]
    fn splits_disjointness() {
        let a = test_corpus("a", &["pos", "neg"]);
        let empty = a.select("e", &[]);
        let splits = CorpusSplits {
            train: a.clone(),
            development: empty.clone(),
            test: empty.clone(),
            exploration: a.select("x", &[0]),
        };
        assert!(matches!(splits.check_disjoint(), Err(CorpusError::Overlap(id)) if id == "d0"));
    }
}
