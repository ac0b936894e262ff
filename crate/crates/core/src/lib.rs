//! Cost-aware text classification under small labelling budgets: weak supervision with
//! labelling functions, a naive Bayes baseline, zero-shot prompting of hosted language
//! models, and the learning-curve harness that compares them.
//!
//! Numeric components are generic over [`num::Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod cli;
pub mod corpus;
pub mod eval;
pub mod methods;
pub mod num;
pub mod promptzero;
pub mod synthetic;
pub mod weaksup;

pub use num::Scalar;

pub type LabelModel = weaksup::LabelModel<f64>;
pub type FitConfig = weaksup::FitConfig<f64>;
pub type Lexicon = weaksup::Lexicon<f64>;
pub type LfSet = weaksup::LfSet<f64>;
pub type Vocabulary = baseline::Vocabulary<f64>;
pub type TfIdfVector = baseline::TfIdfVector<f64>;
pub type NbModel = baseline::NbModel<f64>;
pub type NaiveBayesClassifier = baseline::NaiveBayesClassifier<f64>;
pub type MetricsRow = eval::MetricsRow<f64>;
