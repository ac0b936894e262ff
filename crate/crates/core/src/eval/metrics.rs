use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::records::{Prediction, PredictionRecord};
use super::EvalError;
use crate::corpus::Corpus;
use crate::num::Scalar;

/// Binary confusion counts (positive = class index 1) plus the number of test
/// documents that were not scored.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    /// Non-responses, transport errors and documents with no prediction at all.
    pub dropped: usize,
}

impl ConfusionMatrix {
    /// Builds the matrix from (gold, predicted) class-index pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut cm = Self::default();
        for (gold, pred) in pairs {
            cm.add(gold, pred);
        }
        cm
    }

    pub fn add(&mut self, gold: usize, pred: usize) {
        match (gold == 1, pred == 1) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    /// Number of scored documents.
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Scores `preds` against the gold labels of `test`.
///
/// Every prediction must name a document of `test`, at most once. Test documents
/// without a prediction, and predictions that are not a class, count as dropped.
pub fn confusion(preds: &[PredictionRecord], test: &Corpus) -> Result<ConfusionMatrix, EvalError> {
    let gold = test.gold_indices()?;
    let row_of: HashMap<&str, usize> = test.ids().enumerate().map(|(i, id)| (id, i)).collect();
    let classes = test.class_set();
    let mut seen = HashSet::with_capacity(preds.len());
    let mut cm = ConfusionMatrix::default();
    for p in preds {
        let row = *row_of.get(p.id.as_str()).ok_or_else(|| EvalError::UnknownId(p.id.clone()))?;
        if !seen.insert(row) {
            return Err(EvalError::DuplicatePrediction(p.id.clone()));
        }
        match &p.pred {
            Prediction::Class(c) => {
                let pred = classes.index_of(c).ok_or_else(|| EvalError::UnknownClass {
                    id: p.id.clone(),
                    pred: c.clone(),
                })?;
                cm.add(gold[row], pred);
            }
            Prediction::NonResponse | Prediction::TransportError => cm.dropped += 1,
        }
    }
    cm.dropped += test.len() - seen.len();
    Ok(cm)
}

/// Per-class and aggregate scores derived from a confusion matrix. Per-class arrays
/// are indexed by class index (0 = negative, 1 = positive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MetricsRow<T> {
    pub precision: [T; 2],
    pub recall: [T; 2],
    pub f1: [T; 2],
    pub macro_f1: T,
    pub accuracy: T,
    pub n_scored: usize,
    pub n_dropped: usize,
}

fn ratio<T: Scalar>(num: usize, den: usize) -> T {
    if den == 0 {
        T::zero()
    } else {
        T::of_usize(num) / T::of_usize(den)
    }
}

fn f1<T: Scalar>(p: T, r: T) -> T {
    if p + r == T::zero() {
        T::zero()
    } else {
        T::of(2.0) * p * r / (p + r)
    }
}

/// Precision, recall and F1 per class, macro-F1 and accuracy. Undefined ratios
/// (0/0) are 0. An empty matrix is an error.
pub fn metrics<T: Scalar>(cm: &ConfusionMatrix) -> Result<MetricsRow<T>, EvalError> {
    let n = cm.total();
    if n == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let precision = [ratio(cm.tn, cm.tn + cm.fn_), ratio(cm.tp, cm.tp + cm.fp)];
    let recall = [ratio(cm.tn, cm.tn + cm.fp), ratio(cm.tp, cm.tp + cm.fn_)];
    let f1 = [f1(precision[0], recall[0]), f1(precision[1], recall[1])];
    Ok(MetricsRow {
        precision,
        recall,
        f1,
        macro_f1: (f1[0] + f1[1]) / T::of(2.0),
        accuracy: ratio(cm.tp + cm.tn, n),
        n_scored: n,
        n_dropped: cm.dropped,
    })
}
