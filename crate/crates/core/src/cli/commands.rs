use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::Serialize;
use serde_json::json;

use super::config::{MethodKind, RunConfig};
use super::manifest::{OutputFile, RunManifest};
use super::{CliError, Cli, Command, GlobalArgs};
use crate::baseline::NaiveBayesClassifier;
use crate::corpus::{
    build_budget_series, carve_exploration, ingest, write_corpus_jsonl, write_split_artifacts, Corpus, SamplingPlan,
};
use crate::eval::{
    run_curve, write_curve_svg, write_metrics_csv, write_predictions, CurveSpec, LearningCurve, MethodRunner, Regime,
};
use crate::methods::{ExternalRunner, NaiveBayesRunner, WeakSupervisionRunner, ZeroShotRunner};
use crate::promptzero::{
    estimate_cost, write_outcome_log, ClassifyOptions, LiveTransport, PriceTable, PromptTemplate, RecordingTransport,
    ReplayTransport, RetryPolicy, Transport, Verbalizer,
};
use crate::weaksup::{diagnose, overlap_any, read_lf_specs, write_diagnostics_csv, FitConfig, LfSet};

/// Applies command-line overrides on top of a loaded config.
fn apply_overrides(cfg: &mut RunConfig, g: &GlobalArgs) {
    if let Some(out) = &g.out {
        cfg.out_dir = std::path::absolute(out).unwrap_or_else(|_| out.clone());
    }
    if let Some(j) = g.jobs {
        cfg.run.jobs = j;
    }
    if let Some(s) = g.seed {
        cfg.sampling.seeds = vec![s];
    }
    if let Some(zs) = &mut cfg.zeroshot {
        if let Some(r) = &g.replay {
            zs.replay = Some(std::path::absolute(r).unwrap_or_else(|_| r.clone()));
            zs.live = false;
        }
        if g.live {
            zs.live = true;
        }
    }
}

pub(super) fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Rerun { manifest } => {
            let m = RunManifest::load(manifest)?;
            if matches!(m.command, Command::Rerun { .. } | Command::ValidateConfig) {
                return Err(CliError::Manifest {
                    path: manifest.clone(),
                    message: format!("`{}` cannot be re-executed", m.command.name()),
                });
            }
            let cfg = m.config.map(|mut c| {
                apply_overrides(&mut c, &GlobalArgs { out: g.out.clone(), jobs: g.jobs, ..Default::default() });
                c
            });
            let out = g.out.clone().or_else(|| cfg.as_ref().map(|c| c.out_dir.clone()));
            run_with_manifest(&m.command, cfg.as_ref(), out)
        }
        Command::ValidateConfig => {
            let path = g.config.as_ref().ok_or_else(|| CliError::Usage("--config is required".into()))?;
            let mut cfg = RunConfig::load(path)?;
            apply_overrides(&mut cfg, g);
            let errs = cfg.validate();
            if !errs.is_empty() {
                return Err(CliError::Config(errs));
            }
            println!("{}: ok", path.display());
            Ok(())
        }
        cmd => {
            let cfg = match &g.config {
                Some(path) => {
                    let mut cfg = RunConfig::load(path)?;
                    apply_overrides(&mut cfg, g);
                    Some(cfg)
                }
                None => None,
            };
            let out = g.out.clone().or_else(|| cfg.as_ref().map(|c| c.out_dir.clone()));
            run_with_manifest(cmd, cfg.as_ref(), out)
        }
    }
}

fn run_with_manifest(cmd: &Command, cfg: Option<&RunConfig>, out: Option<PathBuf>) -> Result<(), CliError> {
    if let Some(c) = cfg {
        let errs = c.validate();
        if !errs.is_empty() {
            return Err(CliError::Config(errs));
        }
    }
    let started_at = chrono::Utc::now().to_rfc3339();
    let report = execute(cmd, cfg, out.as_deref())?;
    if let Some(out) = &out {
        let outputs = report
            .outputs
            .iter()
            .map(|p| OutputFile::hash(out, p))
            .collect::<Result<Vec<_>, _>>()?;
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            command: cmd.clone(),
            config: cfg.cloned(),
            seeds: cfg.map(|c| c.sampling.seeds.clone()).unwrap_or_default(),
            started_at,
            finished_at: chrono::Utc::now().to_rfc3339(),
            failed_cells: report.failed_cells,
            outputs,
        };
        let path = manifest.write(out)?;
        println!("manifest: {}", path.display());
    }
    if report.failed_cells > 0 {
        return Err(CliError::CellFailures(report.failed_cells));
    }
    Ok(())
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Report {
    pub outputs: Vec<PathBuf>,
    pub failed_cells: usize,
}

/// Runs `cmd`; `out` is required by every command except `cost`.
pub fn execute(cmd: &Command, cfg: Option<&RunConfig>, out: Option<&Path>) -> Result<Report, CliError> {
    if let Command::Cost { model, input, template } = cmd {
        return cost(cfg, out, model.as_deref(), input.as_deref(), template.as_deref());
    }
    let cfg = cfg.ok_or_else(|| CliError::Usage(format!("`{}` needs --config", cmd.name())))?;
    let out = out.unwrap_or(&cfg.out_dir);
    mkdir(out)?;
    match cmd {
        Command::Ingest => ingest_cmd(cfg, out),
        Command::Sample => sample(cfg, out),
        Command::LfReport => lf_report(cfg, out),
        Command::Run { method, regime, budget } => run_single(cfg, out, *method, *regime, *budget),
        Command::Curve { methods, regimes } => curve(cfg, out, methods, regimes),
        Command::Cost { .. } | Command::ValidateConfig | Command::Rerun { .. } => unreachable!("handled by dispatch"),
    }
}

fn mkdir(p: &Path) -> Result<(), CliError> {
    fs::create_dir_all(p).map_err(|source| CliError::Io {
        path: p.to_path_buf(),
        source,
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("value serializes") + "\n";
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

struct Data {
    /// Training documents left after carving the exploration set.
    pool: Option<Corpus>,
    test: Corpus,
    exploration: Option<Corpus>,
}

fn load_data(cfg: &RunConfig) -> Result<Data, CliError> {
    let classes = cfg.class_set()?;
    let test = ingest(&cfg.data.test, cfg.corpus_format(&cfg.data.test), &classes)?;
    let (pool, exploration) = match &cfg.data.train {
        None => (None, None),
        Some(p) => {
            let train = ingest(p, cfg.corpus_format(p), &classes)?;
            if cfg.data.exploration_size > 0 {
                let (expl, rest) = carve_exploration(&train, cfg.data.exploration_size, cfg.data.exploration_seed)?;
                (Some(rest), Some(expl))
            } else {
                (Some(train), None)
            }
        }
    };
    Ok(Data { pool, test, exploration })
}

fn prevalence(cfg: &RunConfig, pool: Option<&Corpus>) -> f64 {
    cfg.sampling.positive_prevalence.unwrap_or_else(|| match pool {
        Some(p) if !p.is_empty() => {
            let c = p.class_counts();
            c[1] as f64 / (c[0] + c[1]).max(1) as f64
        }
        _ => 0.5,
    })
}

fn ingest_cmd(cfg: &RunConfig, out: &Path) -> Result<Report, CliError> {
    let data = load_data(cfg)?;
    let dir = out.join("corpus");
    mkdir(&dir)?;
    let mut report = Report::default();
    let mut summary = Vec::new();
    for (split, c) in [("train", data.pool.as_ref()), ("exploration", data.exploration.as_ref()), ("test", Some(&data.test))] {
        let Some(c) = c else { continue };
        let path = dir.join(format!("{split}.jsonl"));
        write_corpus_jsonl(c, &path)?;
        report.outputs.push(path);
        let counts = c.class_counts();
        println!(
            "{split}: {} documents ({} {}, {} {}, {} unlabelled)",
            c.len(),
            counts[0],
            c.class_set().negative(),
            counts[1],
            c.class_set().positive(),
            c.len() - counts[0] - counts[1]
        );
        summary.push(json!({ "split": split, "n_docs": c.len(), "class_counts": counts, "length_chars": c.length_stats() }));
    }
    let path = dir.join("summary.json");
    write_json(&path, &summary)?;
    report.outputs.push(path);
    Ok(report)
}

fn sample(cfg: &RunConfig, out: &Path) -> Result<Report, CliError> {
    let data = load_data(cfg)?;
    let pool = data
        .pool
        .as_ref()
        .ok_or_else(|| CliError::Usage("sample needs data.train".into()))?;
    let prevalence = prevalence(cfg, Some(pool));
    let mut modes: Vec<_> = cfg.sampling.regimes.iter().map(|r| r.train_mode()).collect();
    modes.sort_by_key(|m| *m as u8);
    modes.dedup();
    let mut series = Vec::new();
    for &mode in &modes {
        for &seed in &cfg.sampling.seeds {
            let plan = SamplingPlan::new(cfg.sampling.budgets.clone(), mode, seed, prevalence)?;
            series.push((mode, seed, build_budget_series(pool, &plan)?));
        }
    }
    let balanced_test = Regime::Balanced.test_set(&data.test)?;
    let mut fixed: Vec<(&str, &Corpus, Option<u64>)> = vec![("train", pool, None), ("test", &data.test, None)];
    if cfg.sampling.regimes.contains(&Regime::Balanced) {
        fixed.push(("test-balanced", &balanced_test, None));
    }
    if let Some(e) = &data.exploration {
        fixed.push(("exploration", e, Some(cfg.data.exploration_seed)));
    }
    let series_refs: Vec<_> = series.iter().map(|(m, s, v)| (*m, *s, v.as_slice())).collect();
    let dir = out.join("splits");
    let manifest = write_split_artifacts(&dir, &cfg.task, &fixed, &series_refs)?;
    println!("wrote {} split files under {}", manifest.entries.len(), dir.display());
    let mut report = Report::default();
    report.outputs.extend(manifest.entries.iter().map(|e| dir.join(&e.path)));
    report.outputs.push(dir.join("split_manifest.json"));
    Ok(report)
}

fn lf_set(cfg: &RunConfig) -> Result<LfSet<f64>, CliError> {
    let ws = cfg.ws.as_ref().ok_or_else(|| CliError::Usage("a [ws] section is required".into()))?;
    let specs = read_lf_specs(&ws.lf_specs)?;
    Ok(LfSet::compile(&specs, &cfg.class_set()?, cfg.lexicon()?)?)
}

fn lf_report(cfg: &RunConfig, out: &Path) -> Result<Report, CliError> {
    let data = load_data(cfg)?;
    let exploration = data
        .exploration
        .ok_or_else(|| CliError::Usage("lf-report needs data.exploration_size > 0".into()))?;
    let lfs = lf_set(cfg)?;
    let diagnostics = diagnose(&lfs, &exploration)?;
    let path = out.join("lf_report.csv");
    write_diagnostics_csv(&diagnostics, &path)?;
    println!("{:<28} {:>8} {:>8} {:>8} {:>7}", "lf", "coverage", "overlap", "accuracy", "votes");
    for d in &diagnostics {
        let acc = d.accuracy.map(|a| format!("{a:.3}")).unwrap_or_else(|| "-".into());
        println!("{:<28} {:>8.3} {:>8.3} {:>8} {:>7}", d.lf, d.coverage, d.overlap, acc, d.n_votes);
    }
    let m = lfs.apply(&exploration);
    println!("rows with overlapping votes: {:.3} ({} exploration documents)", overlap_any(&m), exploration.len());
    Ok(Report {
        outputs: vec![path],
        failed_cells: 0,
    })
}

enum Runner {
    Nb(NaiveBayesRunner),
    Ws(WeakSupervisionRunner),
    ZeroShot(ZeroShotRunner),
    External(ExternalRunner),
}

impl Runner {
    fn build(kind: MethodKind, cfg: &RunConfig) -> Result<Self, CliError> {
        Ok(match kind {
            MethodKind::Nb => Runner::Nb(NaiveBayesRunner { alpha: cfg.nb.alpha }),
            MethodKind::Ws => {
                let ws = cfg.ws.as_ref().ok_or_else(|| CliError::Usage("a [ws] section is required".into()))?;
                Runner::Ws(WeakSupervisionRunner {
                    specs: read_lf_specs(&ws.lf_specs)?,
                    lexicon: cfg.lexicon()?,
                    fit: FitConfig {
                        learning_rate: ws.learning_rate,
                        iterations: ws.iterations,
                        l2: ws.l2,
                    },
                })
            }
            MethodKind::Zeroshot => {
                let zs = cfg
                    .zeroshot
                    .as_ref()
                    .ok_or_else(|| CliError::Usage("a [zeroshot] section is required".into()))?;
                let transport: Arc<dyn Transport> = if zs.live {
                    let live = LiveTransport::from_env(&zs.endpoint, Duration::from_secs(zs.timeout_secs))?;
                    match &zs.record {
                        Some(p) => Arc::new(RecordingTransport::create(live, p)?),
                        None => Arc::new(live),
                    }
                } else {
                    let p = zs
                        .replay
                        .as_ref()
                        .ok_or_else(|| CliError::Usage("zero-shot needs a replay fixture or --live".into()))?;
                    Arc::new(ReplayTransport::from_path(p)?)
                };
                let mut options = ClassifyOptions::new(&zs.model);
                options.temperature = zs.temperature;
                options.max_tokens = zs.max_tokens;
                options.max_in_flight = zs.max_in_flight;
                options.rate_limit_per_sec = zs.rate_limit_per_sec;
                options.retry = RetryPolicy::default();
                Runner::ZeroShot(ZeroShotRunner::new(
                    transport,
                    zs.template()?,
                    Verbalizer::new(zs.verbalizer.clone())?,
                    options,
                ))
            }
            MethodKind::External => {
                let ext = cfg
                    .external
                    .as_ref()
                    .ok_or_else(|| CliError::Usage("an [external] section is required".into()))?;
                Runner::External(ExternalRunner {
                    method: ext.method.clone(),
                    path: ext.predictions.clone(),
                })
            }
        })
    }

    fn as_dyn(&self) -> &dyn MethodRunner {
        match self {
            Runner::Nb(r) => r,
            Runner::Ws(r) => r,
            Runner::ZeroShot(r) => r,
            Runner::External(r) => r,
        }
    }
}

/// Writes per-cell predictions and, for zero-shot, the raw outcome log.
fn write_curve_artifacts(
    out: &Path,
    curve: &LearningCurve,
    runner: &Runner,
    test: &Corpus,
    report: &mut Report,
) -> Result<(), CliError> {
    let dir = out.join("predictions").join(&curve.method).join(curve.regime.slug());
    mkdir(&dir)?;
    for cell in curve.cells() {
        if let Ok(m) = &cell.outcome {
            let path = dir.join(format!("b{}-s{}.jsonl", cell.budget, cell.seed));
            write_predictions(&m.predictions, &path)?;
            report.outputs.push(path);
        }
    }
    if let Runner::ZeroShot(zs) = runner {
        if let Some(outcomes) = zs.outcomes_for(&curve.regime.test_set(test)?) {
            let dir = out.join("zeroshot");
            mkdir(&dir)?;
            let path = dir.join(format!("outcomes-{}.jsonl", curve.regime.slug()));
            write_outcome_log(&outcomes, &path)?;
            report.outputs.push(path);
        }
    }
    Ok(())
}

fn print_failures(curves: &[LearningCurve]) -> usize {
    let mut failed = 0;
    for c in curves {
        for cell in c.cells() {
            if let Err(e) = &cell.outcome {
                failed += 1;
                eprintln!("failed: {} {} budget={} seed={}: {e}", c.method, c.regime, cell.budget, cell.seed);
            }
        }
    }
    failed
}

fn run_single(
    cfg: &RunConfig,
    out: &Path,
    method: MethodKind,
    regime: Option<Regime>,
    budget: Option<usize>,
) -> Result<Report, CliError> {
    let data = load_data(cfg)?;
    let regime = regime.unwrap_or(cfg.sampling.regimes[0]);
    let budget = budget.unwrap_or(*cfg.sampling.budgets.last().expect("validated non-empty"));
    let runner = Runner::build(method, cfg)?;
    let empty = Corpus::new("train", cfg.class_set()?, Vec::new())?;
    let pool = data.pool.as_ref().unwrap_or(&empty);
    let spec = CurveSpec {
        budgets: vec![budget],
        seeds: cfg.sampling.seeds.clone(),
        positive_prevalence: prevalence(cfg, data.pool.as_ref()),
        regime,
        jobs: cfg.run.jobs,
    };
    let curve = run_curve(runner.as_dyn(), pool, &data.test, &spec)?;
    let mut report = Report::default();
    let name = format!("run-{}-{}-b{budget}", curve.method, regime.slug());
    let path = out.join(format!("{name}.csv"));
    write_metrics_csv(std::slice::from_ref(&curve), &path, cfg.run.record_timing)?;
    report.outputs.push(path);
    write_curve_artifacts(out, &curve, &runner, &data.test, &mut report)?;

    if method == MethodKind::Nb {
        let dir = out.join("models");
        mkdir(&dir)?;
        for &seed in &cfg.sampling.seeds {
            let plan = SamplingPlan::new(vec![budget], regime.train_mode(), seed, spec.positive_prevalence)?;
            let Ok(series) = build_budget_series(pool, &plan) else { continue };
            let clf = NaiveBayesClassifier::<f64>::fit(&series[0].1, cfg.nb.alpha)?;
            let path = dir.join(format!("nb-{}-b{budget}-s{seed}.json", regime.slug()));
            clf.save(&path)?;
            report.outputs.push(path);
        }
    }
    for cell in curve.cells() {
        if let Ok(m) = &cell.outcome {
            println!(
                "{} {} budget={} seed={}: macro_f1={:.4} accuracy={:.4} scored={} dropped={}",
                curve.method, regime, cell.budget, cell.seed, m.metrics.macro_f1, m.metrics.accuracy, m.metrics.n_scored, m.metrics.n_dropped
            );
        }
    }
    if let Runner::ZeroShot(zs) = &runner {
        println!("live API calls: {}", zs.transport.live_calls());
    }
    report.failed_cells = print_failures(std::slice::from_ref(&curve));
    Ok(report)
}

#[derive(Serialize)]
struct RowSummary {
    budget: usize,
    mean_macro_f1: Option<f64>,
    min_macro_f1: Option<f64>,
    max_macro_f1: Option<f64>,
    mean_n_dropped: Option<f64>,
    failed_seeds: usize,
}

#[derive(Serialize)]
struct CurveSummary {
    method: String,
    regime: Regime,
    seeds: Vec<u64>,
    rows: Vec<RowSummary>,
}

fn curve(cfg: &RunConfig, out: &Path, methods: &[MethodKind], regimes: &[Regime]) -> Result<Report, CliError> {
    let pick_methods: Vec<MethodKind> = if methods.is_empty() { cfg.run.methods.clone() } else { methods.to_vec() };
    let pick_regimes: Vec<Regime> = if regimes.is_empty() { cfg.sampling.regimes.clone() } else { regimes.to_vec() };
    let mut problems = Vec::new();
    for m in &pick_methods {
        if !cfg.run.methods.contains(m) {
            problems.push(format!("--method {m:?}: not listed in run.methods"));
        }
    }
    if !problems.is_empty() {
        return Err(CliError::Config(problems));
    }
    let data = load_data(cfg)?;
    let empty = Corpus::new("train", cfg.class_set()?, Vec::new())?;
    let pool = data.pool.as_ref().unwrap_or(&empty);
    let runners: Vec<Runner> = pick_methods
        .iter()
        .map(|&m| Runner::build(m, cfg))
        .collect::<Result<_, _>>()?;

    let mut report = Report::default();
    let mut curves = Vec::new();
    for &regime in &pick_regimes {
        let spec = CurveSpec {
            budgets: cfg.sampling.budgets.clone(),
            seeds: cfg.sampling.seeds.clone(),
            positive_prevalence: prevalence(cfg, data.pool.as_ref()),
            regime,
            jobs: cfg.run.jobs,
        };
        let mut regime_curves = Vec::new();
        for runner in &runners {
            let curve = run_curve(runner.as_dyn(), pool, &data.test, &spec)?;
            write_curve_artifacts(out, &curve, runner, &data.test, &mut report)?;
            regime_curves.push(curve);
        }
        let svg = out.join(format!("curve-{}.svg", regime.slug()));
        write_curve_svg(&regime_curves, &format!("{} — {}", cfg.task, regime), &svg)?;
        report.outputs.push(svg);
        curves.extend(regime_curves);
    }

    let metrics = out.join("metrics.csv");
    write_metrics_csv(&curves, &metrics, cfg.run.record_timing)?;
    report.outputs.push(metrics);

    let live_calls: usize = runners
        .iter()
        .map(|r| match r {
            Runner::ZeroShot(z) => z.transport.live_calls(),
            _ => 0,
        })
        .sum();
    let summaries: Vec<CurveSummary> = curves
        .iter()
        .map(|c| CurveSummary {
            method: c.method.clone(),
            regime: c.regime,
            seeds: c.seeds.clone(),
            rows: c
                .rows
                .iter()
                .map(|r| RowSummary {
                    budget: r.budget,
                    mean_macro_f1: r.mean_macro_f1(),
                    min_macro_f1: r.band().map(|b| b.0),
                    max_macro_f1: r.band().map(|b| b.1),
                    mean_n_dropped: r.mean_of(|m| m.metrics.n_dropped as f64),
                    failed_seeds: r.cells.iter().filter(|c| c.outcome.is_err()).count(),
                })
                .collect(),
        })
        .collect();
    let failed = print_failures(&curves);
    let n_cells: usize = curves.iter().map(|c| c.cells().count()).sum();
    let summary_path = out.join("curve_summary.json");
    write_json(
        &summary_path,
        &json!({
            "task": cfg.task,
            "live_calls": live_calls,
            "cells": n_cells,
            "failed_cells": failed,
            "curves": summaries,
        }),
    )?;
    report.outputs.push(summary_path);

    for s in &summaries {
        for r in &s.rows {
            match (r.mean_macro_f1, r.min_macro_f1, r.max_macro_f1) {
                (Some(mean), Some(lo), Some(hi)) => println!(
                    "{:<10} {:<28} budget={:<5} macro_f1={mean:.4} [{lo:.4}, {hi:.4}] dropped={}",
                    s.method,
                    s.regime.to_string(),
                    r.budget,
                    r.mean_n_dropped.unwrap_or(0.0)
                ),
                _ => println!("{:<10} {:<28} budget={:<5} all seeds failed", s.method, s.regime.to_string(), r.budget),
            }
        }
    }
    println!("cells: {n_cells}, failed: {failed}, live API calls: {live_calls}");
    report.failed_cells = failed;
    Ok(report)
}

/// Texts from a JSONL (`text` field per line) or CSV (`text` column) file.
fn read_texts(path: &Path) -> Result<Vec<String>, CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let bad = |line: usize, message: String| CliError::Usage(format!("{}:{line}: {message}", path.display()));
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| io(std::io::Error::other(e)))?;
        let col = rdr
            .headers()
            .map_err(|e| io(std::io::Error::other(e)))?
            .iter()
            .position(|h| h == "text")
            .ok_or_else(|| bad(1, "no `text` column".into()))?;
        return rdr
            .records()
            .enumerate()
            .map(|(i, r)| r.map(|r| r[col].to_owned()).map_err(|e| bad(i + 2, e.to_string())))
            .collect();
    }
    let text = fs::read_to_string(path).map_err(io)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let v: serde_json::Value = serde_json::from_str(l).map_err(|e| bad(i + 1, e.to_string()))?;
            v.get("text")
                .and_then(|t| t.as_str())
                .map(str::to_owned)
                .ok_or_else(|| bad(i + 1, "missing string field `text`".into()))
        })
        .collect()
}

fn cost(
    cfg: Option<&RunConfig>,
    out: Option<&Path>,
    model: Option<&str>,
    input: Option<&Path>,
    template: Option<&str>,
) -> Result<Report, CliError> {
    let model = model
        .map(str::to_owned)
        .or_else(|| cfg.and_then(|c| c.zeroshot.as_ref()).map(|z| z.model.clone()))
        .ok_or_else(|| CliError::Usage("cost needs --model or a [zeroshot] model in the config".into()))?;
    let input = input
        .map(Path::to_path_buf)
        .or_else(|| cfg.map(|c| c.data.test.clone()))
        .ok_or_else(|| CliError::Usage("cost needs --input or a config".into()))?;
    let prices = match cfg {
        Some(c) => c.prices()?,
        None => PriceTable::default(),
    };
    let template = template.map(PromptTemplate::bundled).transpose()?;
    let texts = read_texts(&input)?;
    let est = estimate_cost(texts.iter().map(String::as_str), template.as_ref(), &prices, &model)?;
    println!(
        "{}: {} documents, {} tokens ({} in, {} out) -> £{:.3}",
        est.model, est.n_docs, est.tokens, est.input_tokens, est.output_tokens, est.cost_gbp
    );
    let mut report = Report::default();
    if let Some(out) = out {
        mkdir(out)?;
        let path = out.join(format!("cost-{}.json", model.replace(['/', '\\'], "_")));
        write_json(&path, &est)?;
        report.outputs.push(path);
    }
    Ok(report)
}
