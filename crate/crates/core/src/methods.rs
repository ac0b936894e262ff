//! [`MethodRunner`] implementations for every method the curve harness can drive.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use crate::baseline::NaiveBayesClassifier;
use crate::corpus::Corpus;
use crate::eval::{
    read_predictions, CellContext, FittedMethod, MethodRunner, Prediction, PredictionRecord, Regime, RunnerError,
};
use crate::promptzero::{classify_zero_shot, ClassifyOptions, CompletionOutcome, Parsed, PromptTemplate, Transport, Verbalizer};
use crate::weaksup::{fit_label_model, predict_ws, FitConfig, LabelModel, LabelingFunctionSpec, Lexicon, LfSet};

/// Multinomial naive Bayes over TF-IDF features.
pub struct NaiveBayesRunner {
    pub alpha: f64,
}

struct FittedNb(NaiveBayesClassifier<f64>);

impl MethodRunner for NaiveBayesRunner {
    fn method(&self) -> &str {
        "nb"
    }

    fn fit(&self, train: &Corpus, _ctx: &CellContext) -> Result<Box<dyn FittedMethod>, RunnerError> {
        Ok(Box::new(FittedNb(NaiveBayesClassifier::fit(train, self.alpha)?)))
    }
}

impl FittedMethod for FittedNb {
    fn predict(&self, test: &Corpus) -> Result<Vec<PredictionRecord>, RunnerError> {
        Ok(test
            .documents()
            .iter()
            .map(|d| {
                let (class, score) = self.0.predict(&d.text);
                PredictionRecord::class(&d.id, self.0.classes.label(class), Some(score), "nb")
            })
            .collect())
    }
}

/// Labelling functions combined by a label model whose weights are fitted on the
/// training subset. Training time includes compiling and applying the LFs.
pub struct WeakSupervisionRunner {
    pub specs: Vec<LabelingFunctionSpec>,
    pub lexicon: Lexicon<f64>,
    pub fit: FitConfig<f64>,
}

struct FittedWs {
    lfs: LfSet<f64>,
    model: LabelModel<f64>,
}

impl MethodRunner for WeakSupervisionRunner {
    fn method(&self) -> &str {
        "ws"
    }

    fn fit(&self, train: &Corpus, _ctx: &CellContext) -> Result<Box<dyn FittedMethod>, RunnerError> {
        let lfs = LfSet::compile(&self.specs, train.class_set(), self.lexicon.clone())?;
        let m = lfs.apply(train);
        let gold: Vec<Option<usize>> = train.gold_indices()?.into_iter().map(Some).collect();
        let model = fit_label_model(&m, &gold, &self.fit)?;
        Ok(Box::new(FittedWs { lfs, model }))
    }
}

impl FittedMethod for FittedWs {
    fn predict(&self, test: &Corpus) -> Result<Vec<PredictionRecord>, RunnerError> {
        let m = self.lfs.apply(test);
        let classes = test.class_set();
        m.rows()
            .zip(test.documents())
            .map(|(row, d)| {
                let (class, score) = predict_ws(&self.model, row)?;
                Ok(PredictionRecord::class(&d.id, classes.label(class), Some(score), "ws"))
            })
            .collect()
    }
}

/// Prompted classification without training data. Every cell sees the same test set,
/// so each distinct test set is sent to the model once and the outcomes are reused.
pub struct ZeroShotRunner {
    pub transport: Arc<dyn Transport>,
    pub template: PromptTemplate,
    pub verbalizer: Verbalizer,
    pub options: ClassifyOptions,
    cache: Arc<Mutex<HashMap<String, Arc<Vec<CompletionOutcome>>>>>,
}

impl ZeroShotRunner {
    pub fn new(transport: Arc<dyn Transport>, template: PromptTemplate, verbalizer: Verbalizer, options: ClassifyOptions) -> Self {
        Self {
            transport,
            template,
            verbalizer,
            options,
            cache: Arc::default(),
        }
    }

    /// Outcomes for `test`, if a cell has classified it.
    pub fn outcomes_for(&self, test: &Corpus) -> Option<Arc<Vec<CompletionOutcome>>> {
        self.cache.lock().expect("cache lock").get(&cache_key(test)).cloned()
    }

    /// Outcomes gathered so far, keyed by test-set name.
    pub fn outcomes(&self) -> Vec<(String, Arc<Vec<CompletionOutcome>>)> {
        let mut v: Vec<_> = self
            .cache
            .lock()
            .expect("cache lock")
            .iter()
            .map(|(k, o)| (k.clone(), Arc::clone(o)))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }
}

fn cache_key(test: &Corpus) -> String {
    format!("{}:{}", test.name(), crate::corpus::ids_digest(test))
}

struct FittedZeroShot {
    transport: Arc<dyn Transport>,
    template: PromptTemplate,
    verbalizer: Verbalizer,
    options: ClassifyOptions,
    cache: Arc<Mutex<HashMap<String, Arc<Vec<CompletionOutcome>>>>>,
}

impl MethodRunner for ZeroShotRunner {
    fn method(&self) -> &str {
        "zero-shot"
    }

    fn uses_training_data(&self) -> bool {
        false
    }

    fn fit(&self, _train: &Corpus, _ctx: &CellContext) -> Result<Box<dyn FittedMethod>, RunnerError> {
        Ok(Box::new(FittedZeroShot {
            transport: Arc::clone(&self.transport),
            template: self.template.clone(),
            verbalizer: self.verbalizer.clone(),
            options: self.options.clone(),
            cache: Arc::clone(&self.cache),
        }))
    }
}

impl FittedMethod for FittedZeroShot {
    fn predict(&self, test: &Corpus) -> Result<Vec<PredictionRecord>, RunnerError> {
        // Holding the lock while classifying keeps concurrent cells from issuing
        // duplicate requests for the same test set.
        let mut cache = self.cache.lock().expect("cache lock");
        let key = cache_key(test);
        let outcomes = match cache.get(&key) {
            Some(o) => Arc::clone(o),
            None => {
                let o = Arc::new(classify_zero_shot(
                    self.transport.as_ref(),
                    &self.template,
                    &self.verbalizer,
                    test.documents(),
                    &self.options,
                )?);
                cache.insert(key, Arc::clone(&o));
                o
            }
        };
        drop(cache);
        Ok(outcomes
            .iter()
            .map(|o| PredictionRecord {
                id: o.doc_id.clone(),
                pred: match &o.parsed {
                    Parsed::Class(c) => Prediction::Class(c.clone()),
                    Parsed::NonResponse => Prediction::NonResponse,
                    Parsed::TransportError(_) => Prediction::TransportError,
                },
                score: None,
                method: "zero-shot".into(),
                budget: None,
                seed: None,
            })
            .collect())
    }
}

/// Predictions produced by another process in the interchange format. `{regime}` in the
/// path is replaced by the regime's file-safe name; records whose budget or seed is null
/// match every cell.
pub struct ExternalRunner {
    pub method: String,
    pub path: PathBuf,
}

struct FittedExternal(Vec<PredictionRecord>);

impl ExternalRunner {
    pub fn path_for(&self, regime: Regime) -> PathBuf {
        PathBuf::from(self.path.to_string_lossy().replace("{regime}", regime.slug()))
    }
}

impl MethodRunner for ExternalRunner {
    fn method(&self) -> &str {
        &self.method
    }

    fn uses_training_data(&self) -> bool {
        false
    }

    fn fit(&self, _train: &Corpus, ctx: &CellContext) -> Result<Box<dyn FittedMethod>, RunnerError> {
        let records = read_predictions(&self.path_for(ctx.regime))?;
        let matching: Vec<PredictionRecord> = records
            .into_iter()
            .filter(|r| r.budget.is_none_or(|b| b == ctx.budget) && r.seed.is_none_or(|s| s == ctx.seed))
            .collect();
        if matching.is_empty() {
            return Err(format!("no predictions for budget {} seed {}", ctx.budget, ctx.seed).into());
        }
        Ok(Box::new(FittedExternal(matching)))
    }
}

impl FittedMethod for FittedExternal {
    fn predict(&self, _test: &Corpus) -> Result<Vec<PredictionRecord>, RunnerError> {
        Ok(self.0.clone())
    }
}
