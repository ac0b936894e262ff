use std::path::Path;

use serde::Serialize;

use super::lf::{LabelMatrix, LfSet};
use super::WeakSupError;
use crate::corpus::Corpus;
use crate::num::Scalar;

fn fraction(count: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        count as f64 / n as f64
    }
}

/// Share of rows on which `lf` does not abstain.
pub fn coverage(m: &LabelMatrix, lf: &str) -> Result<f64, WeakSupError> {
    let j = m.lf_index(lf)?;
    let votes = m.column(j).filter(|v| !v.is_abstain()).count();
    Ok(fraction(votes, m.n_rows()))
}

/// Share of rows on which `lf` votes and at least one other labelling function votes too.
pub fn overlap(m: &LabelMatrix, lf: &str) -> Result<f64, WeakSupError> {
    let j = m.lf_index(lf)?;
    let count = m
        .rows()
        .filter(|row| {
            !row[j].is_abstain() && row.iter().enumerate().any(|(k, v)| k != j && !v.is_abstain())
        })
        .count();
    Ok(fraction(count, m.n_rows()))
}

/// Share of rows on which two or more labelling functions vote.
pub fn overlap_any(m: &LabelMatrix) -> f64 {
    let count = m
        .rows()
        .filter(|row| row.iter().filter(|v| !v.is_abstain()).count() >= 2)
        .count();
    fraction(count, m.n_rows())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LfDiagnostic {
    pub lf: String,
    pub coverage: f64,
    pub overlap: f64,
    /// Correct votes over non-abstaining votes; `None` when the function never votes.
    pub accuracy: Option<f64>,
    pub n_votes: usize,
}

/// Per-LF coverage, overlap and empirical accuracy on a fully labelled exploration set.
pub fn diagnose<T: Scalar>(lfs: &LfSet<T>, exploration: &Corpus) -> Result<Vec<LfDiagnostic>, WeakSupError> {
    let gold = exploration.gold_indices()?;
    let m = lfs.apply(exploration);
    let mut report = Vec::with_capacity(m.n_lfs());
    for (j, name) in m.lf_names().iter().enumerate() {
        let mut n_votes = 0;
        let mut correct = 0;
        for (vote, &g) in m.column(j).zip(&gold) {
            if let Some(c) = vote.class() {
                n_votes += 1;
                if c == g {
                    correct += 1;
                }
            }
        }
        report.push(LfDiagnostic {
            lf: name.clone(),
            coverage: coverage(&m, name)?,
            overlap: overlap(&m, name)?,
            accuracy: (n_votes > 0).then(|| correct as f64 / n_votes as f64),
            n_votes,
        });
    }
    Ok(report)
}

/// Writes `lf,coverage,overlap,accuracy,n_votes`; an absent accuracy is an empty field.
pub fn write_diagnostics_csv(report: &[LfDiagnostic], path: &Path) -> Result<(), WeakSupError> {
    let io = |e: csv::Error| WeakSupError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["lf", "coverage", "overlap", "accuracy", "n_votes"]).map_err(io)?;
    for r in report {
        w.write_record([
            r.lf.clone(),
            r.coverage.to_string(),
            r.overlap.to_string(),
            r.accuracy.map(|a| a.to_string()).unwrap_or_default(),
            r.n_votes.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|source| WeakSupError::Io {
        path: path.to_path_buf(),
        source,
    })
}
