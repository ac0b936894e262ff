use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{confusion, metrics, ConfusionMatrix, MetricsRow};
use super::records::PredictionRecord;
use super::EvalError;
use crate::corpus::{balance_classes, build_budget_series, BalanceMode, Corpus, SamplingPlan};

/// Error type runners may return; a failing cell is recorded, never propagated.
pub type RunnerError = Box<dyn std::error::Error + Send + Sync>;

/// Seed used to balance the test set, shared by every cell so all seeds see the same test documents.
const TEST_BALANCE_SEED: u64 = 0;

/// Class balance of the training subsets and of the test set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "balanced")]
    Balanced,
    #[serde(rename = "natural")]
    Natural,
    #[serde(rename = "balanced-train/natural-test")]
    BalancedTrainNaturalTest,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::Balanced, Regime::Natural, Regime::BalancedTrainNaturalTest];

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Balanced => "balanced",
            Regime::Natural => "natural",
            Regime::BalancedTrainNaturalTest => "balanced-train/natural-test",
        }
    }

    /// Filesystem-safe form of the name.
    pub fn slug(self) -> &'static str {
        match self {
            Regime::BalancedTrainNaturalTest => "balanced-train-natural-test",
            r => r.as_str(),
        }
    }

    pub fn train_mode(self) -> BalanceMode {
        match self {
            Regime::Natural => BalanceMode::Natural,
            _ => BalanceMode::Balanced,
        }
    }

    pub fn balanced_test(self) -> bool {
        self == Regime::Balanced
    }

    /// Test set seen by every cell of this regime.
    pub fn test_set(self, test: &Corpus) -> Result<Corpus, EvalError> {
        if self.balanced_test() {
            Ok(balance_classes(test, TEST_BALANCE_SEED)?)
        } else {
            Ok(test.clone())
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Regime::ALL
            .into_iter()
            .find(|r| r.as_str() == s || r.slug() == s)
            .ok_or_else(|| format!("unknown regime `{s}` (expected balanced, natural or balanced-train/natural-test)"))
    }
}

/// Identifies one point of a learning curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellContext {
    pub budget: usize,
    pub seed: u64,
    pub regime: Regime,
}

/// A method that can be trained on a labelled subset and then applied to a test set.
pub trait MethodRunner: Send + Sync {
    /// Tag written to the `method` column.
    fn method(&self) -> &str;

    /// False for methods that ignore the training subset (zero-shot, external); their
    /// cells receive an empty subset and never fail for lack of pool documents.
    fn uses_training_data(&self) -> bool {
        true
    }

    fn fit(&self, train: &Corpus, ctx: &CellContext) -> Result<Box<dyn FittedMethod>, RunnerError>;
}

pub trait FittedMethod: Send {
    /// One record per test document it has an answer for; missing documents count as dropped.
    fn predict(&self, test: &Corpus) -> Result<Vec<PredictionRecord>, RunnerError>;
}

#[derive(Debug, Clone)]
pub struct CellMetrics {
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsRow<f64>,
    pub train_seconds: f64,
    pub infer_seconds: f64,
    pub predictions: Vec<PredictionRecord>,
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub budget: usize,
    pub seed: u64,
    pub outcome: Result<CellMetrics, String>,
}

impl CellResult {
    pub fn macro_f1(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|c| c.metrics.macro_f1)
    }
}

/// All seeds for one budget, in configured seed order.
#[derive(Debug, Clone)]
pub struct CurveRow {
    pub budget: usize,
    pub cells: Vec<CellResult>,
}

impl CurveRow {
    fn succeeded(&self) -> impl Iterator<Item = &CellMetrics> {
        self.cells.iter().filter_map(|c| c.outcome.as_ref().ok())
    }

    /// Mean of `f` over the successful cells, if any.
    pub fn mean_of(&self, f: impl Fn(&CellMetrics) -> f64) -> Option<f64> {
        let vals: Vec<f64> = self.succeeded().map(f).collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }

    pub fn mean_macro_f1(&self) -> Option<f64> {
        self.mean_of(|c| c.metrics.macro_f1)
    }

    /// (min, max) macro-F1 across successful seeds.
    pub fn band(&self) -> Option<(f64, f64)> {
        self.succeeded().map(|c| c.metrics.macro_f1).fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct LearningCurve {
    pub method: String,
    pub regime: Regime,
    pub seeds: Vec<u64>,
    pub rows: Vec<CurveRow>,
}

impl LearningCurve {
    pub fn cells(&self) -> impl Iterator<Item = &CellResult> {
        self.rows.iter().flat_map(|r| &r.cells)
    }

    pub fn failed_cells(&self) -> usize {
        self.cells().filter(|c| c.outcome.is_err()).count()
    }
}

/// Budgets, seeds and sampling parameters for [`run_curve`].
#[derive(Debug, Clone)]
pub struct CurveSpec {
    pub budgets: Vec<usize>,
    pub seeds: Vec<u64>,
    /// Positive share of natural-mode training subsets.
    pub positive_prevalence: f64,
    pub regime: Regime,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
}

/// Trains and scores `runner` at every (budget, seed) cell.
///
/// Each cell draws its training subset from `train_pool` with its own seeded generator,
/// so results do not depend on scheduling. A failing cell is recorded with its error and
/// the other cells still run.
pub fn run_curve(runner: &dyn MethodRunner, train_pool: &Corpus, test: &Corpus, spec: &CurveSpec) -> Result<LearningCurve, EvalError> {
    if spec.budgets.is_empty() || spec.seeds.is_empty() {
        return Err(EvalError::EmptyCurve);
    }
    let test = spec.regime.test_set(test)?;
    let available = train_pool.class_counts();

    let mut cells: Vec<(usize, u64, Result<Corpus, String>)> = Vec::new();
    for &seed in &spec.seeds {
        if !runner.uses_training_data() {
            let empty = train_pool.select(format!("{}-unused", train_pool.name()), &[]);
            cells.extend(spec.budgets.iter().map(|&b| (b, seed, Ok(empty.clone()))));
            continue;
        }
        let plan = SamplingPlan {
            budgets: spec.budgets.clone(),
            balance_mode: spec.regime.train_mode(),
            seed,
            positive_prevalence: spec.positive_prevalence,
        };
        if let Err(e) = plan.validate() {
            cells.extend(spec.budgets.iter().map(|&b| (b, seed, Err(e.to_string()))));
            continue;
        }
        let feasible: Vec<usize> = plan
            .budgets
            .iter()
            .copied()
            .filter(|&b| {
                let need = plan.class_counts(b);
                need[0] <= available[0] && need[1] <= available[1]
            })
            .collect();
        let series = if feasible.is_empty() {
            Ok(Vec::new())
        } else {
            build_budget_series(train_pool, &SamplingPlan { budgets: feasible, ..plan.clone() }).map_err(|e| e.to_string())
        };
        for &budget in &spec.budgets {
            let subset = match &series {
                Err(e) => Err(e.clone()),
                Ok(s) => match s.iter().find(|(b, _)| *b == budget) {
                    Some((_, c)) => Ok(c.clone()),
                    None => {
                        let need = plan.class_counts(budget);
                        Err(format!(
                            "budget {budget} needs {}/{} documents per class, pool has {}/{}",
                            need[0], need[1], available[0], available[1]
                        ))
                    }
                },
            };
            cells.push((budget, seed, subset));
        }
    }

    let execute = || -> Vec<CellResult> {
        cells
            .par_iter()
            .map(|(budget, seed, subset)| {
                let ctx = CellContext {
                    budget: *budget,
                    seed: *seed,
                    regime: spec.regime,
                };
                let outcome = match subset {
                    Ok(train) => run_cell(runner, train, &test, &ctx),
                    Err(e) => Err(e.clone()),
                };
                CellResult {
                    budget: *budget,
                    seed: *seed,
                    outcome,
                }
            })
            .collect()
    };
    let results = if spec.jobs > 0 {
        match rayon::ThreadPoolBuilder::new().num_threads(spec.jobs).build() {
            Ok(pool) => pool.install(execute),
            Err(_) => execute(),
        }
    } else {
        execute()
    };

    let mut rows: Vec<CurveRow> = spec
        .budgets
        .iter()
        .map(|&budget| CurveRow { budget, cells: Vec::new() })
        .collect();
    for cell in results {
        let row = spec.budgets.iter().position(|&b| b == cell.budget).expect("budget from spec");
        rows[row].cells.push(cell);
    }
    Ok(LearningCurve {
        method: runner.method().to_owned(),
        regime: spec.regime,
        seeds: spec.seeds.clone(),
        rows,
    })
}

fn run_cell(runner: &dyn MethodRunner, train: &Corpus, test: &Corpus, ctx: &CellContext) -> Result<CellMetrics, String> {
    let t0 = Instant::now();
    let fitted = runner.fit(train, ctx).map_err(|e| format!("fit failed: {e}"))?;
    let train_seconds = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let mut predictions = fitted.predict(test).map_err(|e| format!("predict failed: {e}"))?;
    let infer_seconds = t1.elapsed().as_secs_f64();
    for p in &mut predictions {
        p.method = runner.method().to_owned();
        p.budget = Some(ctx.budget);
        p.seed = Some(ctx.seed);
    }
    let cm = confusion(&predictions, test).map_err(|e| e.to_string())?;
    let metrics = metrics(&cm).map_err(|e| e.to_string())?;
    Ok(CellMetrics {
        confusion: cm,
        metrics,
        train_seconds,
        infer_seconds,
        predictions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::test_corpus;
    use std::sync::atomic::{AtomicUsize, Ordering};

    /// Predicts the majority class of its training subset; fails at one chosen budget.
    struct Majority {
        fail_at: Option<usize>,
        fits: AtomicUsize,
    }

    struct Fixed(String);

    impl FittedMethod for Fixed {
        fn predict(&self, test: &Corpus) -> Result<Vec<PredictionRecord>, RunnerError> {
            Ok(test.ids().map(|id| PredictionRecord::class(id, self.0.clone(), None, "x")).collect())
        }
    }

    impl MethodRunner for Majority {
        fn method(&self) -> &str {
            "majority"
        }

        fn fit(&self, train: &Corpus, ctx: &CellContext) -> Result<Box<dyn FittedMethod>, RunnerError> {
            self.fits.fetch_add(1, Ordering::SeqCst);
            if Some(ctx.budget) == self.fail_at {
                return Err("boom".into());
            }
            let c = train.class_counts();
            let label = train.class_set().label(usize::from(c[1] > c[0])).to_owned();
            Ok(Box::new(Fixed(label)))
        }
    }

    fn pool() -> Corpus {
        let mut labels = vec!["neg"; 60];
        labels.extend(vec!["pos"; 40]);
        test_corpus("pool", &labels)
    }

    #[test]
    fn failures_are_isolated() {
        let runner = Majority {
            fail_at: Some(8),
            fits: AtomicUsize::new(0),
        };
        let spec = CurveSpec {
            budgets: vec![4, 8, 16, 128],
            seeds: vec![1, 2, 3],
            positive_prevalence: 0.4,
            regime: Regime::Natural,
            jobs: 2,
        };
        let test = test_corpus("test", &["neg", "neg", "pos"]);
        let curve = run_curve(&runner, &pool(), &test, &spec).unwrap();
        assert_eq!(runner.fits.load(Ordering::SeqCst), 9);
        assert_eq!(curve.rows.len(), 4);
        for row in &curve.rows {
            assert_eq!(row.cells.iter().map(|c| c.seed).collect::<Vec<_>>(), vec![1, 2, 3]);
        }
        assert_eq!(curve.failed_cells(), 6);
        assert!(curve.rows[1].cells.iter().all(|c| c.outcome.as_ref().unwrap_err().contains("boom")));
        assert!(curve.rows[3].cells[0].outcome.as_ref().unwrap_err().contains("pool has"));
        let ok = curve.rows[2].cells[0].outcome.as_ref().unwrap();
        assert_eq!(ok.predictions.len(), 3);
        assert_eq!(ok.predictions[0].budget, Some(16));
        assert_eq!(ok.predictions[0].method, "majority");
        assert_eq!(ok.metrics.n_scored, 3);
    }

    #[test]
    fn balanced_regime_balances_test() {
        let runner = Majority {
            fail_at: None,
            fits: AtomicUsize::new(0),
        };
        let spec = CurveSpec {
            budgets: vec![4],
            seeds: vec![7],
            positive_prevalence: 0.5,
            regime: Regime::Balanced,
            jobs: 0,
        };
        let curve = run_curve(&runner, &pool(), &pool(), &spec).unwrap();
        let m = curve.rows[0].cells[0].outcome.as_ref().unwrap();
        assert_eq!(m.metrics.n_scored, 80);
        assert_eq!(m.metrics.accuracy, 0.5);
    }

    #[test]
    fn regime_names() {
        for r in Regime::ALL {
            assert_eq!(r.as_str().parse::<Regime>().unwrap(), r);
            assert_eq!(r.slug().parse::<Regime>().unwrap(), r);
            assert_eq!(serde_json::to_string(&r).unwrap(), format!("\"{}\"", r.as_str()));
        }
        assert!("mixed".parse::<Regime>().is_err());
    }
}
