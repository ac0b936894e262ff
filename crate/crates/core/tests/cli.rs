use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_cheaplearn");

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(BIN)
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

/// Demo config with absolute data paths, written next to nothing else so it can live in a temp dir.
fn demo_config(dir: &Path, budgets: &str, methods: &str, record_timing: bool) -> PathBuf {
    let text = format!(
        r#"task = "cli-test"

[classes]
negative = "negative"
positive = "positive"

[data]
train = {train:?}
test = {test:?}
exploration_size = 200

[sampling]
budgets = {budgets}
seeds = [1, 2, 3]
regimes = ["balanced"]

[run]
methods = {methods}
jobs = 2
record_timing = {record_timing}

[ws]
lf_specs = {lfs:?}
"#,
        train = fixture("demo/train.jsonl"),
        test = fixture("demo/test.jsonl"),
        lfs = fixture("demo/lfs.jsonl"),
    );
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn metric_rows(csv_path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(csv_path).unwrap().records().map(Result::unwrap).collect()
}

#[test]
fn validate_config_accepts_fixture_and_writes_nothing() {
    let out = tempfile::tempdir().unwrap();
    let target = out.path().join("should-not-exist");
    let o = run(&["validate-config"], &fixture("demo/demo.toml"), &target);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("ok"));
    assert!(!target.exists());
}

#[test]
fn invalid_config_reports_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        r#"task = ""
[classes]
negative = "x"
positive = "x"
[data]
test = "missing.jsonl"
[sampling]
seeds = []
[run]
methods = ["nb"]
"#,
    )
    .unwrap();
    let o = run(&["validate-config"], &path, dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for needle in ["task", "classes", "missing.jsonl", "sampling.seeds", "data.train"] {
        assert!(err.contains(needle), "`{needle}` not reported in:\n{err}");
    }
}

#[test]
fn unparsable_config_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.toml");
    std::fs::write(&path, "task = \n").unwrap();
    let o = run(&["validate-config"], &path, dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn nb_curve_has_detail_and_mean_rows_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = demo_config(dir.path(), "[16, 32, 64, 128, 256, 512, 1024]", r#"["nb"]"#, false);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run(&["curve", "--method", "nb", "--regime", "balanced"], &cfg, out);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let rows = metric_rows(&a.join("metrics.csv"));
    assert_eq!(rows.iter().filter(|r| &r[3] != "mean").count(), 21);
    assert_eq!(rows.iter().filter(|r| &r[3] == "mean").count(), 7);
    assert!(rows.iter().all(|r| r[14].is_empty() && r[15].is_empty()));
    assert_eq!(std::fs::read(a.join("metrics.csv")).unwrap(), std::fs::read(b.join("metrics.csv")).unwrap());
    assert!(a.join("curve-balanced.svg").exists());
    assert!(a.join("manifest-curve.json").exists());
}

#[test]
fn manifest_rerun_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = demo_config(dir.path(), "[16, 64]", r#"["nb", "ws"]"#, false);
    let first = dir.path().join("first");
    let o = run(&["curve"], &cfg, &first);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let second = dir.path().join("second");
    let o = Command::new(BIN)
        .arg("rerun")
        .arg(first.join("manifest-curve.json"))
        .arg("--out")
        .arg(&second)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        std::fs::read(first.join("metrics.csv")).unwrap(),
        std::fs::read(second.join("metrics.csv")).unwrap()
    );
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(first.join("manifest-curve.json")).unwrap()).unwrap();
    assert_eq!(manifest["failed_cells"], 0);
    assert!(manifest["outputs"].as_array().unwrap().iter().all(|o| o["sha256"].as_str().unwrap().len() == 64));
}

#[test]
fn infeasible_budgets_fail_cells_without_aborting() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = demo_config(dir.path(), "[16, 4096]", r#"["nb"]"#, false);
    let out = dir.path().join("out");
    let o = run(&["curve"], &cfg, &out);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = metric_rows(&out.join("metrics.csv"));
    let failed: Vec<_> = rows.iter().filter(|r| &r[2] == "4096" && &r[3] != "mean").collect();
    assert_eq!(failed.len(), 3);
    assert!(failed.iter().all(|r| r[10].is_empty()));
    assert!(rows.iter().any(|r| &r[2] == "16" && &r[3] == "1" && !r[10].is_empty()));
}

#[test]
fn sample_and_lf_report_write_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = demo_config(dir.path(), "[16, 32]", r#"["ws"]"#, false);
    let out = dir.path().join("out");
    assert!(run(&["sample"], &cfg, &out).status.success());
    assert!(out.join("splits/split_manifest.json").exists());
    let o = run(&["lf-report"], &cfg, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(out.join("lf_report.csv")).unwrap();
    assert!(report.lines().count() > 1);
}

#[test]
fn run_single_cell_writes_predictions_in_interchange_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = demo_config(dir.path(), "[16, 64]", r#"["nb"]"#, false);
    let out = dir.path().join("out");
    let o = run(&["run", "nb", "--regime", "natural", "--budget", "64"], &cfg, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let preds = walk(&out).into_iter().find(|p| p.extension().is_some_and(|e| e == "jsonl")).expect("predictions written");
    let text = std::fs::read_to_string(preds).unwrap();
    assert_eq!(text.lines().count(), 600);
    for (i, line) in text.lines().enumerate() {
        cheaplearn::eval::validate_interchange_line(line, i + 1).unwrap();
    }
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}
