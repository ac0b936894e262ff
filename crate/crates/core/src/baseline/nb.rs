use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tfidf::{fit_tfidf, transform, TfIdfVector, Vocabulary};
use super::BaselineError;
use crate::corpus::{ClassSet, Corpus};
use crate::num::{sigmoid, Scalar};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Multinomial Naive Bayes over real-valued feature weights.
///
/// `log_likelihood[c][t] = ln((sum of t's weights in class c + alpha) / (total weight in c + alpha * |V|))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct NbModel<T> {
    pub alpha: T,
    pub log_prior: [T; 2],
    pub log_likelihood: [Vec<T>; 2],
}

impl<T: Scalar> NbModel<T> {
    pub fn dim(&self) -> usize {
        self.log_likelihood[0].len()
    }

    /// Unnormalized log posterior per class.
    pub fn log_scores(&self, x: &TfIdfVector<T>) -> Result<[T; 2], BaselineError> {
        if x.dim() != self.dim() {
            return Err(BaselineError::Dimension {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        let mut scores = self.log_prior;
        for (c, s) in scores.iter_mut().enumerate() {
            *s = *s + x
                .entries()
                .iter()
                .map(|&(t, w)| w * self.log_likelihood[c][t])
                .sum::<T>();
        }
        Ok(scores)
    }
}

/// Fits priors and smoothed likelihoods; `labels` are class indices (1 = positive).
pub fn fit_nb<T: Scalar>(
    vectors: &[TfIdfVector<T>],
    labels: &[usize],
    alpha: T,
    classes: &ClassSet,
) -> Result<NbModel<T>, BaselineError> {
    if !(alpha > T::zero()) {
        return Err(BaselineError::InvalidAlpha(alpha.as_f64()));
    }
    if vectors.len() != labels.len() {
        return Err(BaselineError::LabelCount {
            vectors: vectors.len(),
            labels: labels.len(),
        });
    }
    let dim = vectors.first().map_or(0, TfIdfVector::dim);
    let mut counts = [0usize; 2];
    let mut mass = [vec![T::zero(); dim], vec![T::zero(); dim]];
    for (x, &c) in vectors.iter().zip(labels) {
        if x.dim() != dim {
            return Err(BaselineError::Dimension { expected: dim, got: x.dim() });
        }
        counts[c] += 1;
        for &(t, w) in x.entries() {
            mass[c][t] = mass[c][t] + w;
        }
    }
    for (c, &n) in counts.iter().enumerate() {
        if n == 0 {
            return Err(BaselineError::MissingClass(classes.label(c).to_owned()));
        }
    }
    let total = T::of_usize(vectors.len());
    let log_prior = counts.map(|n| (T::of_usize(n) / total).ln());
    let smoothing = alpha * T::of_usize(dim);
    let log_likelihood = mass.map(|m| {
        let denom = m.iter().copied().sum::<T>() + smoothing;
        m.into_iter().map(|w| ((w + alpha) / denom).ln()).collect()
    });
    Ok(NbModel {
        alpha,
        log_prior,
        log_likelihood,
    })
}

/// Predicted class index and the positive-class posterior. Equal class scores resolve to
/// the negative class.
pub fn predict_nb<T: Scalar>(model: &NbModel<T>, x: &TfIdfVector<T>) -> Result<(usize, T), BaselineError> {
    let [neg, pos] = model.log_scores(x)?;
    let class = usize::from(pos > neg);
    Ok((class, sigmoid(pos - neg)))
}

/// Vocabulary plus fitted model, persisted together as one JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct NaiveBayesClassifier<T> {
    pub format_version: u32,
    pub classes: ClassSet,
    pub vocabulary: Vocabulary<T>,
    pub model: NbModel<T>,
}

impl<T: Scalar> NaiveBayesClassifier<T> {
    pub fn fit(train: &Corpus, alpha: T) -> Result<Self, BaselineError> {
        let vocabulary = fit_tfidf(train)?;
        let labels = train.gold_indices()?;
        let vectors: Vec<TfIdfVector<T>> = train
            .documents()
            .iter()
            .map(|d| transform(&vocabulary, &d.text))
            .collect();
        let model = fit_nb(&vectors, &labels, alpha, train.class_set())?;
        Ok(Self {
            format_version: MODEL_FORMAT_VERSION,
            classes: train.class_set().clone(),
            vocabulary,
            model,
        })
    }

    pub fn predict(&self, text: &str) -> (usize, T) {
        let x = transform(&self.vocabulary, text);
        predict_nb(&self.model, &x).expect("vocabulary and model share a dimension")
    }

    pub fn save(&self, path: &Path) -> Result<(), BaselineError> {
        let json = serde_json::to_string(self)?;
        std::fs::write(path, json).map_err(|source| BaselineError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, BaselineError> {
        let text = std::fs::read_to_string(path).map_err(|source| BaselineError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut clf: Self = serde_json::from_str(&text)?;
        if clf.format_version != MODEL_FORMAT_VERSION {
            return Err(BaselineError::FormatVersion(clf.format_version));
        }
        clf.vocabulary.rebuild_index();
        Ok(clf)
    }
}
