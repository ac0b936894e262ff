//! Evaluation: confusion-derived metrics, the prediction interchange format, learning
//! curves over budgets and seeds, and CSV/SVG report emission.

mod curve;
mod emit;
mod metrics;
mod records;

use std::path::PathBuf;

use thiserror::Error;

pub use curve::{
    run_curve, CellContext, CellMetrics, CellResult, CurveRow, CurveSpec, FittedMethod, LearningCurve, MethodRunner, Regime,
    RunnerError,
};
pub use emit::{metrics_csv_string, write_curve_svg, write_metrics_csv, METRICS_HEADER};
pub use metrics::{confusion, metrics, ConfusionMatrix, MetricsRow};
pub use records::{read_predictions, validate_interchange_line, write_predictions, Prediction, PredictionRecord};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("prediction for unknown document `{0}`")]
    UnknownId(String),
    #[error("duplicate prediction for document `{0}`")]
    DuplicatePrediction(String),
    #[error("prediction `{pred}` for `{id}` is not a class")]
    UnknownClass { id: String, pred: String },
    #[error("confusion matrix is empty: nothing was scored")]
    EmptyMatrix,
    #[error("learning curve has no rows")]
    EmptyCurve,
    #[error("interchange line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
}
