use serde::{Deserialize, Serialize};

use super::lf::{LabelMatrix, Vote};
use super::WeakSupError;
use crate::num::{sigmoid, Scalar};

/// Gradient-descent settings for [`fit_label_model`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig<T> {
    pub learning_rate: T,
    pub iterations: usize,
    pub l2: T,
}

impl<T: Scalar> Default for FitConfig<T> {
    fn default() -> Self {
        Self {
            learning_rate: T::of(0.1),
            iterations: 500,
            l2: T::of(1e-3),
        }
    }
}

/// Per-LF weights over signed votes, with the positive-class prior as the all-abstain fallback.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct LabelModel<T> {
    pub lf_names: Vec<String>,
    pub weights: Vec<T>,
    pub class_prior: T,
    pub decision_threshold: T,
}

impl<T: Scalar> LabelModel<T> {
    /// Unweighted majority vote over `n_lfs` functions.
    pub fn majority_vote(n_lfs: usize, class_prior: T) -> Self {
        Self {
            lf_names: (0..n_lfs).map(|j| format!("lf{j}")).collect(),
            weights: vec![T::one(); n_lfs],
            class_prior,
            decision_threshold: T::zero(),
        }
    }

    pub fn margin(&self, row: &[Vote]) -> T {
        self.weights
            .iter()
            .zip(row)
            .map(|(&w, v)| match v {
                Vote::Abstain => T::zero(),
                Vote::Positive => w,
                Vote::Negative => -w,
            })
            .sum()
    }

    pub fn predict(&self, row: &[Vote]) -> Result<(usize, T), WeakSupError> {
        predict_ws(self, row)
    }
}

/// Class index (1 = positive) and positive-class score for one vote row.
///
/// Rows where every function abstains fall back to the class prior. A score equal to the
/// decision boundary resolves to the negative class.
pub fn predict_ws<T: Scalar>(model: &LabelModel<T>, row: &[Vote]) -> Result<(usize, T), WeakSupError> {
    if row.len() != model.weights.len() {
        return Err(WeakSupError::Dimension {
            expected: model.weights.len(),
            got: row.len(),
        });
    }
    if row.iter().all(|v| v.is_abstain()) {
        let class = usize::from(model.class_prior > T::of(0.5));
        return Ok((class, model.class_prior));
    }
    let score = sigmoid(model.margin(row));
    let class = usize::from(score > sigmoid(model.decision_threshold));
    Ok((class, score))
}

/// Mean logistic loss of the signed weighted vote plus `l2 / 2 * |w|^2`.
fn objective<T: Scalar>(votes: &[Vec<i8>], targets: &[T], weights: &[T], l2: T) -> T {
    let n = T::of_usize(votes.len());
    let data: T = votes
        .iter()
        .zip(targets)
        .map(|(row, &y)| {
            let z = y * dot(row, weights);
            // log(1 + exp(-z)), stable for large |z|
            (-z.abs()).exp().ln_1p() + (-z).max(T::zero())
        })
        .sum();
    let reg: T = weights.iter().map(|&w| w * w).sum();
    data / n + l2 * reg / T::of(2.0)
}

fn dot<T: Scalar>(row: &[i8], weights: &[T]) -> T {
    row.iter()
        .zip(weights)
        .map(|(&v, &w)| match v {
            1 => w,
            -1 => -w,
            _ => T::zero(),
        })
        .sum()
}

fn gradient<T: Scalar>(votes: &[Vec<i8>], targets: &[T], weights: &[T], l2: T) -> Vec<T> {
    let n = T::of_usize(votes.len());
    let mut grad = vec![T::zero(); weights.len()];
    for (row, &y) in votes.iter().zip(targets) {
        let z = y * dot(row, weights);
        let coef = -y * sigmoid(-z);
        for (g, &v) in grad.iter_mut().zip(row) {
            match v {
                1 => *g = *g + coef,
                -1 => *g = *g - coef,
                _ => {}
            }
        }
    }
    grad.iter_mut()
        .zip(weights)
        .for_each(|(g, &w)| *g = *g / n + l2 * w);
    grad
}

/// Fits LF weights against gold labels (class indices, 1 = positive).
pub fn fit_label_model<T: Scalar>(
    m: &LabelMatrix,
    gold: &[Option<usize>],
    cfg: &FitConfig<T>,
) -> Result<LabelModel<T>, WeakSupError> {
    fit_label_model_with_history(m, gold, cfg).map(|(model, _)| model)
}

/// Like [`fit_label_model`], also returning the objective before the first step and after
/// every iteration.
///
/// Full-batch gradient descent from zero weights; a step that would increase the objective
/// is retried at half the learning rate, so the history is non-increasing.
pub fn fit_label_model_with_history<T: Scalar>(
    m: &LabelMatrix,
    gold: &[Option<usize>],
    cfg: &FitConfig<T>,
) -> Result<(LabelModel<T>, Vec<T>), WeakSupError> {
    if !(cfg.learning_rate > T::zero()) || !(cfg.l2 >= T::zero()) {
        return Err(WeakSupError::InvalidConfig(
            "learning rate must be positive and l2 non-negative".into(),
        ));
    }
    if gold.len() != m.n_rows() {
        return Err(WeakSupError::GoldLength {
            gold: gold.len(),
            rows: m.n_rows(),
        });
    }
    let mut targets = Vec::with_capacity(gold.len());
    let mut positives = 0usize;
    for (i, g) in gold.iter().enumerate() {
        match g {
            Some(c) => {
                positives += usize::from(*c == 1);
                targets.push(if *c == 1 { T::one() } else { -T::one() });
            }
            None => return Err(WeakSupError::MissingGold(i)),
        }
    }
    if positives == 0 || positives == gold.len() {
        return Err(WeakSupError::SingleClass);
    }
    let votes: Vec<Vec<i8>> = m.rows().map(|r| r.iter().map(|v| v.signed()).collect()).collect();

    let mut weights = vec![T::zero(); m.n_lfs()];
    let mut loss = objective(&votes, &targets, &weights, cfg.l2);
    let mut history = Vec::with_capacity(cfg.iterations + 1);
    history.push(loss);
    let mut lr = cfg.learning_rate;
    for _ in 0..cfg.iterations {
        let grad = gradient(&votes, &targets, &weights, cfg.l2);
        let mut accepted = false;
        for _ in 0..40 {
            let candidate: Vec<T> = weights.iter().zip(&grad).map(|(&w, &g)| w - lr * g).collect();
            let cand_loss = objective(&votes, &targets, &candidate, cfg.l2);
            if cand_loss <= loss {
                weights = candidate;
                loss = cand_loss;
                accepted = true;
                break;
            }
            lr = lr / T::of(2.0);
        }
        history.push(loss);
        if !accepted {
            break;
        }
    }

    let model = LabelModel {
        lf_names: m.lf_names().to_vec(),
        weights,
        class_prior: T::of_usize(positives) / T::of_usize(gold.len()),
        decision_threshold: T::zero(),
    };
    Ok((model, history))
}
