use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::BaselineError;
use crate::corpus::Corpus;
use crate::num::Scalar;

/// Lowercased maximal runs of letters and digits, in order.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Training vocabulary with smoothed inverse document frequencies.
///
/// Terms are indexed in lexicographic order; `idf(t) = ln((1 + n) / (1 + df(t))) + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct Vocabulary<T> {
    terms: Vec<String>,
    df: Vec<usize>,
    idf: Vec<T>,
    n_docs: usize,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl<T: Scalar> Vocabulary<T> {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn df(&self, index: usize) -> usize {
        self.df[index]
    }

    pub fn idf(&self, index: usize) -> T {
        self.idf[index]
    }

    pub(crate) fn rebuild_index(&mut self) {
        self.index = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
    }
}

pub fn fit_tfidf<T: Scalar>(train: &Corpus) -> Result<Vocabulary<T>, BaselineError> {
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for doc in train.documents() {
        let mut terms = tokenize(&doc.text);
        terms.sort_unstable();
        terms.dedup();
        for t in terms {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    if df.is_empty() {
        return Err(BaselineError::NoTokens);
    }
    let n = train.len();
    let (terms, df): (Vec<String>, Vec<usize>) = df.into_iter().unzip();
    let idf = df
        .iter()
        .map(|&d| (T::of_usize(1 + n) / T::of_usize(1 + d)).ln() + T::one())
        .collect();
    let mut vocab = Vocabulary {
        terms,
        df,
        idf,
        n_docs: n,
        index: HashMap::new(),
    };
    vocab.rebuild_index();
    Ok(vocab)
}

/// Sparse, L2-normalized TF-IDF vector; entries sorted by index, no explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct TfIdfVector<T> {
    dim: usize,
    entries: Vec<(usize, T)>,
}

impl<T: Scalar> TfIdfVector<T> {
    /// Builds a vector from raw weights: drops zeros, sums duplicate indices, sorts.
    pub fn from_entries(dim: usize, raw: impl IntoIterator<Item = (usize, T)>) -> Result<Self, BaselineError> {
        let mut acc: BTreeMap<usize, T> = BTreeMap::new();
        for (i, w) in raw {
            if i >= dim {
                return Err(BaselineError::Dimension { expected: dim, got: i + 1 });
            }
            let e = acc.entry(i).or_insert_with(T::zero);
            *e = *e + w;
        }
        Ok(Self {
            dim,
            entries: acc.into_iter().filter(|(_, w)| *w != T::zero()).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, T)] {
        &self.entries
    }

    pub fn norm(&self) -> T {
        self.entries.iter().map(|&(_, w)| w * w).sum::<T>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&(i, w)| (i, w * factor)).collect(),
        }
    }
}

/// `tf(t, doc) * idf(t)` over in-vocabulary terms, then L2-normalized.
pub fn transform<T: Scalar>(vocab: &Vocabulary<T>, text: &str) -> TfIdfVector<T> {
    let mut tf: BTreeMap<usize, usize> = BTreeMap::new();
    for term in tokenize(text) {
        if let Some(i) = vocab.index_of(&term) {
            *tf.entry(i).or_insert(0) += 1;
        }
    }
    let mut entries: Vec<(usize, T)> = tf
        .into_iter()
        .map(|(i, count)| (i, T::of_usize(count) * vocab.idf(i)))
        .collect();
    let norm = entries.iter().map(|&(_, w)| w * w).sum::<T>().sqrt();
    if norm > T::zero() {
        entries.iter_mut().for_each(|(_, w)| *w = *w / norm);
    }
    TfIdfVector {
        dim: vocab.len(),
        entries,
    }
}
