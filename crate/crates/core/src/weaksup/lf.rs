use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::BufRead;
use std::path::Path;

use rayon::prelude::*;
use regex::{Regex, RegexBuilder};
use serde::{Deserialize, Serialize};

use super::lexicon::{alpha_tokens, score_polarity, Lexicon, PolarityScore};
use super::WeakSupError;
use crate::corpus::{ClassSet, Corpus, Document};
use crate::num::Scalar;

/// A labelling function's output for one document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Vote {
    Abstain,
    Negative,
    Positive,
}

impl Vote {
    pub fn from_class(index: usize) -> Self {
        if index == 0 {
            Vote::Negative
        } else {
            Vote::Positive
        }
    }

    /// +1 positive, -1 negative, 0 abstain.
    pub fn signed(self) -> i8 {
        match self {
            Vote::Abstain => 0,
            Vote::Negative => -1,
            Vote::Positive => 1,
        }
    }

    pub fn class(self) -> Option<usize> {
        match self {
            Vote::Abstain => None,
            Vote::Negative => Some(0),
            Vote::Positive => Some(1),
        }
    }

    pub fn is_abstain(self) -> bool {
        self == Vote::Abstain
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// value > threshold
    Above,
    /// value >= threshold
    AtLeast,
    /// value < threshold
    Below,
    /// value <= threshold
    AtMost,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub threshold: f64,
    pub direction: Direction,
}

impl Threshold {
    pub fn fires(&self, value: f64) -> bool {
        match self.direction {
            Direction::Above => value > self.threshold,
            Direction::AtLeast => value >= self.threshold,
            Direction::Below => value < self.threshold,
            Direction::AtMost => value <= self.threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum LfRule {
    KeywordList {
        keywords: Vec<String>,
        #[serde(default)]
        case_sensitive: bool,
    },
    Regex {
        pattern: String,
        #[serde(default)]
        case_insensitive: bool,
    },
    /// Threshold on the text length in characters.
    LengthThreshold(Threshold),
    PolarityThreshold(Threshold),
    SubjectivityThreshold(Threshold),
    /// Document id -> label recorded by one annotator; abstains on documents it did not label.
    AnnotatorLookup { labels: BTreeMap<String, String> },
}

/// Declarative labelling function as stored in LF spec files.
///
/// `emit` is required for every kind except `annotator_lookup`, which votes the recorded
/// label (and, when `emit` is set, only fires on entries carrying that label).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelingFunctionSpec {
    pub name: String,
    #[serde(flatten)]
    pub rule: LfRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emit: Option<String>,
}

/// Reads an LF spec file: JSON Lines, one spec per line.
pub fn read_lf_specs(path: &Path) -> Result<Vec<LabelingFunctionSpec>, WeakSupError> {
    let io = |source| WeakSupError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = std::fs::File::open(path).map_err(io)?;
    let mut specs = Vec::new();
    for (i, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        let spec = serde_json::from_str(&line).map_err(|e| WeakSupError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        specs.push(spec);
    }
    Ok(specs)
}

#[derive(Debug, Clone)]
enum Matcher {
    Keywords {
        single: HashSet<String>,
        phrases: Vec<Vec<String>>,
        case_sensitive: bool,
    },
    Regex(Regex),
    Length(Threshold),
    Polarity(Threshold),
    Subjectivity(Threshold),
    Annotator(HashMap<String, Vote>),
}

/// A validated, ready-to-apply labelling function.
#[derive(Debug, Clone)]
pub struct LabelingFunction {
    name: String,
    emit: Option<Vote>,
    matcher: Matcher,
}

fn split_tokens(text: &str, case_sensitive: bool) -> Vec<String> {
    if case_sensitive {
        text.split(|c: char| !c.is_alphabetic())
            .filter(|t| !t.is_empty())
            .map(str::to_owned)
            .collect()
    } else {
        alpha_tokens(text).collect()
    }
}

impl LabelingFunction {
    pub fn compile(spec: &LabelingFunctionSpec, classes: &ClassSet) -> Result<Self, WeakSupError> {
        let invalid = |message: String| WeakSupError::InvalidLf {
            name: spec.name.clone(),
            message,
        };
        if spec.name.trim().is_empty() {
            return Err(invalid("name must be non-empty".into()));
        }
        let emit = match &spec.emit {
            Some(label) => Some(Vote::from_class(
                classes
                    .index_of(label)
                    .ok_or_else(|| invalid(format!("emit class `{label}` is not in the class set")))?,
            )),
            None => None,
        };
        let check_threshold = |t: &Threshold| {
            if t.threshold.is_finite() {
                Ok(*t)
            } else {
                Err(invalid("threshold must be finite".into()))
            }
        };
        let matcher = match &spec.rule {
            LfRule::KeywordList { keywords, case_sensitive } => {
                if keywords.is_empty() {
                    return Err(invalid("keyword list is empty".into()));
                }
                let mut single = HashSet::new();
                let mut phrases = Vec::new();
                for kw in keywords {
                    let toks = split_tokens(kw, *case_sensitive);
                    match toks.len() {
                        0 => return Err(invalid(format!("keyword `{kw}` has no letters"))),
                        1 => {
                            single.insert(toks.into_iter().next().unwrap_or_default());
                        }
                        _ => phrases.push(toks),
                    }
                }
                Matcher::Keywords {
                    single,
                    phrases,
                    case_sensitive: *case_sensitive,
                }
            }
            LfRule::Regex { pattern, case_insensitive } => {
                let re = RegexBuilder::new(pattern)
                    .case_insensitive(*case_insensitive)
                    .build()
                    .map_err(|source| WeakSupError::InvalidRegex {
                        name: spec.name.clone(),
                        source,
                    })?;
                Matcher::Regex(re)
            }
            LfRule::LengthThreshold(t) => Matcher::Length(check_threshold(t)?),
            LfRule::PolarityThreshold(t) => Matcher::Polarity(check_threshold(t)?),
            LfRule::SubjectivityThreshold(t) => Matcher::Subjectivity(check_threshold(t)?),
            LfRule::AnnotatorLookup { labels } => {
                let mut map = HashMap::with_capacity(labels.len());
                for (id, label) in labels {
                    let idx = classes
                        .index_of(label)
                        .ok_or_else(|| invalid(format!("annotator label `{label}` for `{id}` is not a class")))?;
                    let vote = Vote::from_class(idx);
                    if emit.is_none_or(|e| e == vote) {
                        map.insert(id.clone(), vote);
                    }
                }
                Matcher::Annotator(map)
            }
        };
        if emit.is_none() && !matches!(matcher, Matcher::Annotator(_)) {
            return Err(invalid("`emit` is required for this kind".into()));
        }
        Ok(Self {
            name: spec.name.clone(),
            emit,
            matcher,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn needs_polarity(&self) -> bool {
        matches!(self.matcher, Matcher::Polarity(_) | Matcher::Subjectivity(_))
    }

    fn vote<T: Scalar>(&self, doc: &Document, polarity: Option<PolarityScore<T>>) -> Vote {
        let emit = self.emit.unwrap_or(Vote::Abstain);
        let fired = match &self.matcher {
            Matcher::Keywords {
                single,
                phrases,
                case_sensitive,
            } => {
                let toks = split_tokens(&doc.text, *case_sensitive);
                toks.iter().any(|t| single.contains(t))
                    || phrases
                        .iter()
                        .any(|p| toks.windows(p.len()).any(|w| w == p.as_slice()))
            }
            Matcher::Regex(re) => re.is_match(&doc.text),
            Matcher::Length(t) => t.fires(doc.char_len() as f64),
            Matcher::Polarity(t) => polarity.is_some_and(|p| t.fires(p.polarity.as_f64())),
            Matcher::Subjectivity(t) => polarity.is_some_and(|p| t.fires(p.subjectivity.as_f64())),
            Matcher::Annotator(map) => return map.get(&doc.id).copied().unwrap_or(Vote::Abstain),
        };
        if fired {
            emit
        } else {
            Vote::Abstain
        }
    }
}

/// Compiled labelling functions plus the lexicon their sentiment rules consult.
#[derive(Debug, Clone)]
pub struct LfSet<T> {
    lfs: Vec<LabelingFunction>,
    lexicon: Lexicon<T>,
}

impl<T: Scalar> LfSet<T> {
    pub fn compile(specs: &[LabelingFunctionSpec], classes: &ClassSet, lexicon: Lexicon<T>) -> Result<Self, WeakSupError> {
        let mut names = HashSet::new();
        let mut lfs = Vec::with_capacity(specs.len());
        for spec in specs {
            if !names.insert(spec.name.as_str()) {
                return Err(WeakSupError::DuplicateLf(spec.name.clone()));
            }
            lfs.push(LabelingFunction::compile(spec, classes)?);
        }
        Ok(Self { lfs, lexicon })
    }

    pub fn names(&self) -> Vec<String> {
        self.lfs.iter().map(|lf| lf.name.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.lfs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lfs.is_empty()
    }

    pub fn vote_row(&self, doc: &Document) -> Vec<Vote> {
        let polarity = self
            .lfs
            .iter()
            .any(LabelingFunction::needs_polarity)
            .then(|| score_polarity(&doc.text, &self.lexicon));
        self.lfs.iter().map(|lf| lf.vote(doc, polarity)).collect()
    }

    /// Builds the label matrix; rows follow corpus order.
    pub fn apply(&self, corpus: &Corpus) -> LabelMatrix {
        let m = self.lfs.len();
        let rows: Vec<Vec<Vote>> = corpus
            .documents()
            .par_iter()
            .with_min_len(64)
            .map(|d| self.vote_row(d))
            .collect();
        let mut votes = Vec::with_capacity(rows.len() * m);
        for r in rows {
            votes.extend(r);
        }
        LabelMatrix {
            doc_ids: corpus.ids().map(str::to_owned).collect(),
            lf_names: self.names(),
            votes,
        }
    }
}

/// Compiles `specs` and applies them to every document of `corpus`.
pub fn apply_lfs<T: Scalar>(
    specs: &[LabelingFunctionSpec],
    corpus: &Corpus,
    lexicon: &Lexicon<T>,
) -> Result<LabelMatrix, WeakSupError> {
    Ok(LfSet::compile(specs, corpus.class_set(), lexicon.clone())?.apply(corpus))
}

/// n x m grid of votes, row-major: one row per document, one column per labelling function.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMatrix {
    doc_ids: Vec<String>,
    lf_names: Vec<String>,
    votes: Vec<Vote>,
}

impl LabelMatrix {
    pub fn new(doc_ids: Vec<String>, lf_names: Vec<String>, votes: Vec<Vote>) -> Result<Self, WeakSupError> {
        if votes.len() != doc_ids.len() * lf_names.len() {
            return Err(WeakSupError::Dimension {
                expected: doc_ids.len() * lf_names.len(),
                got: votes.len(),
            });
        }
        Ok(Self { doc_ids, lf_names, votes })
    }

    /// Matrix with generated ids, mostly for tests and synthetic experiments.
    pub fn from_rows(rows: &[Vec<Vote>], n_lfs: usize) -> Result<Self, WeakSupError> {
        let mut votes = Vec::with_capacity(rows.len() * n_lfs);
        for r in rows {
            if r.len() != n_lfs {
                return Err(WeakSupError::Dimension {
                    expected: n_lfs,
                    got: r.len(),
                });
            }
            votes.extend_from_slice(r);
        }
        Ok(Self {
            doc_ids: (0..rows.len()).map(|i| format!("row{i}")).collect(),
            lf_names: (0..n_lfs).map(|j| format!("lf{j}")).collect(),
            votes,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn n_lfs(&self) -> usize {
        self.lf_names.len()
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn lf_names(&self) -> &[String] {
        &self.lf_names
    }

    pub fn row(&self, i: usize) -> &[Vote] {
        let m = self.n_lfs();
        &self.votes[i * m..(i + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Vote]> {
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    pub fn get(&self, row: usize, lf: usize) -> Vote {
        self.votes[row * self.n_lfs() + lf]
    }

    pub fn column(&self, lf: usize) -> impl Iterator<Item = Vote> + '_ {
        (0..self.n_rows()).map(move |i| self.get(i, lf))
    }

    pub fn lf_index(&self, name: &str) -> Result<usize, WeakSupError> {
        self.lf_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| WeakSupError::UnknownLf(name.to_owned()))
    }

    /// Copy with the columns rearranged so that new column `k` is old column `order[k]`.
    pub fn select_columns(&self, order: &[usize]) -> LabelMatrix {
        let mut votes = Vec::with_capacity(self.n_rows() * order.len());
        for i in 0..self.n_rows() {
            votes.extend(order.iter().map(|&j| self.get(i, j)));
        }
        LabelMatrix {
            doc_ids: self.doc_ids.clone(),
            lf_names: order.iter().map(|&j| self.lf_names[j].clone()).collect(),
            votes,
        }
    }
}
