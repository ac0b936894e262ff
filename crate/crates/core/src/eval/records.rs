use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EvalError;

/// Predicted label on the wire: a class id, `NON_RESPONSE`, or `TRANSPORT_ERROR`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum Prediction {
    Class(String),
    NonResponse,
    TransportError,
}

impl Prediction {
    pub fn is_scored(&self) -> bool {
        matches!(self, Prediction::Class(_))
    }
}

impl From<String> for Prediction {
    fn from(s: String) -> Self {
        match s.as_str() {
            "NON_RESPONSE" => Prediction::NonResponse,
            "TRANSPORT_ERROR" => Prediction::TransportError,
            _ => Prediction::Class(s),
        }
    }
}

impl From<Prediction> for String {
    fn from(p: Prediction) -> Self {
        match p {
            Prediction::Class(c) => c,
            Prediction::NonResponse => "NON_RESPONSE".to_owned(),
            Prediction::TransportError => "TRANSPORT_ERROR".to_owned(),
        }
    }
}

/// One line of the prediction interchange format:
/// `{"id","pred","score","method","budget","seed"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionRecord {
    pub id: String,
    pub pred: Prediction,
    /// Positive-class score in [0, 1], when the method produces one.
    pub score: Option<f64>,
    pub method: String,
    pub budget: Option<usize>,
    pub seed: Option<u64>,
}

impl PredictionRecord {
    pub fn class(id: impl Into<String>, class: impl Into<String>, score: Option<f64>, method: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            pred: Prediction::Class(class.into()),
            score,
            method: method.into(),
            budget: None,
            seed: None,
        }
    }

    fn check(&self) -> Result<(), String> {
        if self.id.is_empty() {
            return Err("empty id".into());
        }
        if self.method.trim().is_empty() {
            return Err("empty method tag".into());
        }
        if let Prediction::Class(c) = &self.pred {
            if c.is_empty() {
                return Err("empty pred".into());
            }
        }
        if let Some(s) = self.score {
            if !(0.0..=1.0).contains(&s) {
                return Err(format!("score {s} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Parses and validates one interchange line (1-based `line` for messages).
pub fn validate_interchange_line(text: &str, line: usize) -> Result<PredictionRecord, EvalError> {
    let schema = |message: String| EvalError::Schema { line, message };
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    let obj = value.as_object().ok_or_else(|| schema("not a JSON object".into()))?;
    for key in ["id", "pred", "score", "method", "budget", "seed"] {
        if !obj.contains_key(key) {
            return Err(schema(format!("missing field `{key}`")));
        }
    }
    let rec: PredictionRecord = serde_json::from_value(value).map_err(|e| schema(e.to_string()))?;
    rec.check().map_err(schema)?;
    Ok(rec)
}

pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRecord>, EvalError> {
    let io = |source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io)?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(validate_interchange_line(&line, i + 1)?);
    }
    Ok(out)
}

pub fn write_predictions(records: &[PredictionRecord], path: &Path) -> Result<(), EvalError> {
    let io = |source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    for (i, r) in records.iter().enumerate() {
        r.check().map_err(|message| EvalError::Schema { line: i + 1, message })?;
        let line = serde_json::to_string(r).expect("record serializes");
        writeln!(w, "{line}").map_err(io)?;
    }
    w.flush().map_err(io)
}
