use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::curve::{CellMetrics, LearningCurve};
use super::EvalError;

pub const METRICS_HEADER: [&str; 16] = [
    "method",
    "regime",
    "budget",
    "seed",
    "precision_pos",
    "recall_pos",
    "f1_pos",
    "precision_neg",
    "recall_neg",
    "f1_neg",
    "macro_f1",
    "accuracy",
    "n_scored",
    "n_dropped",
    "train_seconds",
    "infer_seconds",
];

/// Metric columns (everything after `seed`) extracted from one cell.
fn metric_values(c: &CellMetrics) -> [f64; 12] {
    let m = &c.metrics;
    [
        m.precision[1],
        m.recall[1],
        m.f1[1],
        m.precision[0],
        m.recall[0],
        m.f1[0],
        m.macro_f1,
        m.accuracy,
        m.n_scored as f64,
        m.n_dropped as f64,
        c.train_seconds,
        c.infer_seconds,
    ]
}

fn push_values(record: &mut Vec<String>, values: Option<[f64; 12]>, include_timing: bool) {
    match values {
        Some(v) => {
            for (i, x) in v.iter().enumerate() {
                record.push(if i >= 10 && !include_timing { String::new() } else { x.to_string() });
            }
        }
        None => record.extend(std::iter::repeat_n(String::new(), 12)),
    }
}

/// Renders the per-cell metrics table: one row per (budget, seed) followed by a
/// `mean` row per budget averaging its successful cells. Failed cells keep their row
/// with empty metric columns. With `include_timing` off the timing columns are left
/// empty so repeated runs produce identical bytes.
pub fn metrics_csv_string(curves: &[LearningCurve], include_timing: bool) -> Result<String, EvalError> {
    if curves.is_empty() || curves.iter().any(|c| c.rows.is_empty()) {
        return Err(EvalError::EmptyCurve);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| EvalError::Io {
        path: "<metrics>".into(),
        source: std::io::Error::other(e),
    };
    w.write_record(METRICS_HEADER).map_err(csv_err)?;
    for curve in curves {
        for row in &curve.rows {
            for cell in &row.cells {
                let mut rec = vec![
                    curve.method.clone(),
                    curve.regime.to_string(),
                    row.budget.to_string(),
                    cell.seed.to_string(),
                ];
                push_values(&mut rec, cell.outcome.as_ref().ok().map(metric_values), include_timing);
                w.write_record(&rec).map_err(csv_err)?;
            }
            let ok: Vec<[f64; 12]> = row.cells.iter().filter_map(|c| c.outcome.as_ref().ok().map(metric_values)).collect();
            let mean = (!ok.is_empty()).then(|| {
                let mut acc = [0.0; 12];
                for v in &ok {
                    for (a, x) in acc.iter_mut().zip(v) {
                        *a += x;
                    }
                }
                acc.map(|a| a / ok.len() as f64)
            });
            let mut rec = vec![
                curve.method.clone(),
                curve.regime.to_string(),
                row.budget.to_string(),
                "mean".to_owned(),
            ];
            push_values(&mut rec, mean, include_timing);
            w.write_record(&rec).map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| csv_err(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_metrics_csv(curves: &[LearningCurve], path: &Path, include_timing: bool) -> Result<(), EvalError> {
    let text = metrics_csv_string(curves, include_timing)?;
    fs::write(path, text).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Macro-F1 against budget on a log2 axis, one line per curve with a shaded
/// min–max band across seeds.
pub fn write_curve_svg(curves: &[LearningCurve], title: &str, path: &Path) -> Result<(), EvalError> {
    let budgets: Vec<usize> = curves.iter().flat_map(|c| c.rows.iter().map(|r| r.budget)).collect();
    let (Some(&lo), Some(&hi)) = (budgets.iter().min(), budgets.iter().max()) else {
        return Err(EvalError::EmptyCurve);
    };
    let (w, h) = (720.0, 440.0);
    let (left, right, top, bottom) = (60.0, 200.0, 40.0, 50.0);
    let (x0, x1) = ((lo as f64).log2(), (hi as f64).log2().max((lo as f64).log2() + 1.0));
    let px = |b: usize| left + ((b as f64).log2() - x0) / (x1 - x0) * (w - left - right);
    let py = |v: f64| top + (1.0 - v) * (h - top - bottom);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{left}" y="24" font-size="14">{}</text>"#, escape(title));
    for i in 0..=10 {
        let v = i as f64 / 10.0;
        let y = py(v);
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#e5e5e5"/><text x="{:.1}" y="{:.1}" text-anchor="end">{v:.1}</text>"##,
            w - right,
            left - 6.0,
            y + 4.0
        );
    }
    let mut ticks = budgets.clone();
    ticks.sort_unstable();
    ticks.dedup();
    for b in &ticks {
        let x = px(*b);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.1}" y1="{top}" x2="{x:.1}" y2="{:.1}" stroke="#e5e5e5"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{b}</text>"##,
            h - bottom,
            h - bottom + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">labelled training documents (log2 scale)</text>"#,
        (left + w - right) / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" transform="rotate(-90 16 {:.1})" text-anchor="middle">macro-F1</text>"#,
        (top + h - bottom) / 2.0,
        (top + h - bottom) / 2.0
    );

    for (i, curve) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<(usize, f64, (f64, f64))> = curve
            .rows
            .iter()
            .filter_map(|r| Some((r.budget, r.mean_macro_f1()?, r.band()?)))
            .collect();
        if pts.is_empty() {
            continue;
        }
        let mut band = String::new();
        for (b, _, (_, top_v)) in &pts {
            let _ = write!(band, "{:.1},{:.1} ", px(*b), py(*top_v));
        }
        for (b, _, (low_v, _)) in pts.iter().rev() {
            let _ = write!(band, "{:.1},{:.1} ", px(*b), py(*low_v));
        }
        let _ = writeln!(s, r#"<polygon points="{}" fill="{color}" fill-opacity="0.18" stroke="none"/>"#, band.trim_end());
        let line: Vec<String> = pts.iter().map(|(b, m, _)| format!("{:.1},{:.1}", px(*b), py(*m))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, line.join(" "));
        for (b, m, _) in &pts {
            let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#, px(*b), py(*m));
        }
        let ly = top + 10.0 + 20.0 * i as f64;
        let lx = w - right + 16.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.1}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&curve.method)
        );
    }
    let note_y = top + 10.0 + 20.0 * curves.len() as f64 + 10.0;
    let _ = writeln!(
        s,
        r##"<rect x="{:.1}" y="{:.1}" width="20" height="10" fill="#888" fill-opacity="0.3"/><text x="{:.1}" y="{note_y:.1}">min–max across seeds</text>"##,
        w - right + 16.0,
        note_y - 8.0,
        w - right + 42.0
    );
    s.push_str("</svg>\n");
    fs::write(path, s).map_err(|source| EvalError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::curve::{CellResult, CurveRow, Regime};
    use crate::eval::metrics::{metrics, ConfusionMatrix};

    fn cell(seed: u64, tp: usize, tn: usize) -> CellResult {
        let cm = ConfusionMatrix {
            tp,
            fp: 10 - tn,
            fn_: 10 - tp,
            tn,
            dropped: 0,
        };
        CellResult {
            budget: 16,
            seed,
            outcome: Ok(CellMetrics {
                confusion: cm,
                metrics: metrics(&cm).unwrap(),
                train_seconds: 0.5,
                infer_seconds: 0.25,
                predictions: Vec::new(),
            }),
        }
    }

    fn curve() -> LearningCurve {
        LearningCurve {
            method: "nb".into(),
            regime: Regime::Balanced,
            seeds: vec![1, 2, 3],
            rows: vec![CurveRow {
                budget: 16,
                cells: vec![
                    cell(1, 8, 6),
                    CellResult {
                        budget: 16,
                        seed: 2,
                        outcome: Err("x".into()),
                    },
                    cell(3, 4, 9),
                ],
            }],
        }
    }

    #[test]
    fn csv_layout_and_mean_row() {
        let text = metrics_csv_string(&[curve()], true).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], METRICS_HEADER.join(","));
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[2], "nb,balanced,16,2,,,,,,,,,,,,");
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        let f = |r: &csv::StringRecord, i: usize| r[i].parse::<f64>().unwrap();
        assert_eq!(&rows[3][3], "mean");
        for col in 4..16 {
            let want = (f(&rows[0], col) + f(&rows[2], col)) / 2.0;
            assert!((f(&rows[3], col) - want).abs() < 1e-12);
        }
        let quiet = metrics_csv_string(&[curve()], false).unwrap();
        assert!(quiet.lines().nth(1).unwrap().ends_with(",20,0,,"));
    }

    #[test]
    fn empty_curve_is_an_error() {
        let mut c = curve();
        c.rows.clear();
        assert!(matches!(metrics_csv_string(&[c], true), Err(EvalError::EmptyCurve)));
        assert!(matches!(metrics_csv_string(&[], true), Err(EvalError::EmptyCurve)));
    }

    #[test]
    fn svg_has_band_and_legend() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.svg");
        write_curve_svg(&[curve()], "balanced", &p).unwrap();
        let svg = std::fs::read_to_string(p).unwrap();
        assert!(svg.contains("<polygon"));
        assert!(svg.contains("min–max across seeds"));
        assert!(svg.contains(">nb<"));
    }
}
