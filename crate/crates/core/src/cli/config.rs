//! TOML run configuration. Relative paths are resolved against the config file's directory.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::corpus::{BalanceMode, ClassSet, CorpusFormat, SamplingPlan};
use crate::eval::Regime;
use crate::promptzero::{PriceTable, PromptTemplate, Verbalizer};
use crate::weaksup::{read_lf_specs, Lexicon, LfSet};

pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    Nb,
    Ws,
    Zeroshot,
    External,
}

impl MethodKind {
    pub fn trains(self) -> bool {
        matches!(self, MethodKind::Nb | MethodKind::Ws)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Task name, used in output file names and manifests.
    pub task: String,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    pub classes: ClassesConfig,
    pub data: DataConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    pub run: RunSection,
    #[serde(default)]
    pub nb: NbConfig,
    pub ws: Option<WsConfig>,
    pub zeroshot: Option<ZeroShotConfig>,
    pub external: Option<ExternalConfig>,
    /// Per-model prices in GBP per 1,000 tokens, layered over the built-in table.
    #[serde(default)]
    pub prices: BTreeMap<String, f64>,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassesConfig {
    pub negative: String,
    pub positive: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// Training pool; required by methods that train.
    pub train: Option<PathBuf>,
    pub test: PathBuf,
    /// `jsonl` or `csv`; inferred from the extension when absent.
    pub format: Option<String>,
    /// Documents carved from the training pool for LF debugging; never used for training.
    #[serde(default)]
    pub exploration_size: usize,
    #[serde(default)]
    pub exploration_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    #[serde(default = "default_budgets")]
    pub budgets: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_regimes")]
    pub regimes: Vec<Regime>,
    /// Positive share of natural-mode subsets; defaults to the training pool's share.
    pub positive_prevalence: Option<f64>,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            budgets: default_budgets(),
            seeds: default_seeds(),
            regimes: default_regimes(),
            positive_prevalence: None,
        }
    }
}

fn default_budgets() -> Vec<usize> {
    SamplingPlan::DEFAULT_BUDGETS.to_vec()
}

fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3]
}

fn default_regimes() -> Vec<Regime> {
    vec![Regime::Balanced]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub methods: Vec<MethodKind>,
    /// Parallel curve cells; 0 picks one per core.
    #[serde(default)]
    pub jobs: usize,
    /// Wall-clock columns in metrics CSVs. Timings differ between runs, so turn this off
    /// when byte-identical reruns matter.
    #[serde(default = "yes")]
    pub record_timing: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NbConfig {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

impl Default for NbConfig {
    fn default() -> Self {
        Self { alpha: default_alpha() }
    }
}

fn default_alpha() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WsConfig {
    pub lf_specs: PathBuf,
    /// Polarity/subjectivity CSV; the bundled lexicon when absent.
    pub lexicon: Option<PathBuf>,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_l2")]
    pub l2: f64,
}

fn default_lr() -> f64 {
    0.1
}

fn default_iterations() -> usize {
    500
}

fn default_l2() -> f64 {
    1e-3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroShotConfig {
    /// Bundled template name, or the name of `pattern` when that is given.
    pub template: String,
    pub pattern: Option<String>,
    /// Class label -> answer words.
    pub verbalizer: BTreeMap<String, Vec<String>>,
    pub model: String,
    #[serde(default = "default_endpoint")]
    pub endpoint: String,
    /// Replay fixture (`{"id","response"}` per line) used instead of the network.
    pub replay: Option<PathBuf>,
    /// Send requests to `endpoint`; needs the API key in the environment.
    #[serde(default)]
    pub live: bool,
    /// In live mode, append every response to this fixture for later replay.
    pub record: Option<PathBuf>,
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
    pub rate_limit_per_sec: Option<f64>,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
}

fn default_endpoint() -> String {
    DEFAULT_ENDPOINT.to_owned()
}

fn default_in_flight() -> usize {
    4
}

fn default_timeout() -> u64 {
    30
}

fn default_temperature() -> f64 {
    0.1
}

fn default_max_tokens() -> u32 {
    20
}

impl ZeroShotConfig {
    pub fn template(&self) -> Result<PromptTemplate, crate::promptzero::PromptError> {
        match &self.pattern {
            Some(p) => PromptTemplate::new(&self.template, p),
            None => PromptTemplate::bundled(&self.template),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalConfig {
    #[serde(default = "default_external_method")]
    pub method: String,
    /// Interchange JSONL; `{regime}` is replaced by the regime's file-safe name.
    pub predictions: PathBuf,
}

fn default_external_method() -> String {
    "external".to_owned()
}

fn resolve(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

impl RunConfig {
    /// Parses `path` and resolves relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::parse(&text).map_err(|message| CliError::ParseConfig {
            path: path.to_path_buf(),
            message,
        })?;
        let base = path
            .parent()
            .map(Path::to_path_buf)
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or_else(|| PathBuf::from("."));
        let base = fs::canonicalize(&base).unwrap_or(base);
        cfg.resolve_paths(&base);
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        resolve(base, &mut self.out_dir);
        if let Some(p) = &mut self.data.train {
            resolve(base, p);
        }
        resolve(base, &mut self.data.test);
        if let Some(ws) = &mut self.ws {
            resolve(base, &mut ws.lf_specs);
            if let Some(p) = &mut ws.lexicon {
                resolve(base, p);
            }
        }
        if let Some(zs) = &mut self.zeroshot {
            for p in [&mut zs.replay, &mut zs.record].into_iter().flatten() {
                resolve(base, p);
            }
        }
        if let Some(ext) = &mut self.external {
            resolve(base, &mut ext.predictions);
        }
    }

    pub fn class_set(&self) -> Result<ClassSet, crate::corpus::CorpusError> {
        ClassSet::binary(&self.classes.negative, &self.classes.positive)
    }

    pub fn corpus_format(&self, path: &Path) -> CorpusFormat {
        self.data
            .format
            .as_deref()
            .and_then(|f| f.parse().ok())
            .unwrap_or_else(|| CorpusFormat::from_path(path))
    }

    pub fn prices(&self) -> Result<PriceTable, crate::promptzero::PromptError> {
        Ok(PriceTable::default().merged(&PriceTable::new(self.prices.clone())?))
    }

    pub fn lexicon(&self) -> Result<Lexicon<f64>, crate::weaksup::WeakSupError> {
        match self.ws.as_ref().and_then(|w| w.lexicon.as_deref()) {
            Some(p) => Lexicon::from_csv_path(p),
            None => Ok(Lexicon::bundled()),
        }
    }

    /// Every problem with the configuration, or nothing when it is usable.
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let need_file = |what: &str, p: &Path, errs: &mut Vec<String>| {
            if !p.is_file() {
                errs.push(format!("{what}: file not found: {}", p.display()));
            }
        };
        if self.task.trim().is_empty() {
            errs.push("task: must not be empty".into());
        }
        let classes = match self.class_set() {
            Ok(c) => Some(c),
            Err(e) => {
                errs.push(format!("classes: {e}"));
                None
            }
        };
        if let Some(f) = &self.data.format {
            if let Err(e) = f.parse::<CorpusFormat>() {
                errs.push(format!("data.format: {e}"));
            }
        }
        need_file("data.test", &self.data.test, &mut errs);
        let methods = &self.run.methods;
        if methods.is_empty() {
            errs.push("run.methods: must list at least one method".into());
        }
        if methods.iter().collect::<HashSet<_>>().len() != methods.len() {
            errs.push("run.methods: duplicate entries".into());
        }
        match &self.data.train {
            Some(p) => need_file("data.train", p, &mut errs),
            None if methods.iter().any(|m| m.trains()) || self.data.exploration_size > 0 => {
                errs.push("data.train: required by nb, ws and exploration".into())
            }
            None => {}
        }

        let s = &self.sampling;
        if s.seeds.is_empty() {
            errs.push("sampling.seeds: must not be empty".into());
        }
        if s.seeds.iter().collect::<HashSet<_>>().len() != s.seeds.len() {
            errs.push("sampling.seeds: duplicate seeds".into());
        }
        if s.regimes.is_empty() {
            errs.push("sampling.regimes: must not be empty".into());
        }
        let modes: HashSet<BalanceMode> = s.regimes.iter().map(|r| r.train_mode()).collect();
        for mode in [BalanceMode::Balanced, BalanceMode::Natural] {
            if !modes.contains(&mode) {
                continue;
            }
            let plan = SamplingPlan {
                budgets: s.budgets.clone(),
                balance_mode: mode,
                seed: 0,
                positive_prevalence: s.positive_prevalence.unwrap_or(0.5),
            };
            if let Err(e) = plan.validate() {
                errs.push(format!("sampling: {e}"));
            }
        }

        if methods.contains(&MethodKind::Nb) && !(self.nb.alpha > 0.0 && self.nb.alpha.is_finite()) {
            errs.push("nb.alpha: must be positive".into());
        }
        match (&self.ws, methods.contains(&MethodKind::Ws)) {
            (None, true) => errs.push("ws: section required when `ws` is a method".into()),
            (Some(ws), _) => {
                if !(ws.learning_rate > 0.0) || !(ws.l2 >= 0.0) || ws.iterations == 0 {
                    errs.push("ws: learning_rate and iterations must be positive, l2 non-negative".into());
                }
                if let Some(p) = &ws.lexicon {
                    need_file("ws.lexicon", p, &mut errs);
                }
                need_file("ws.lf_specs", &ws.lf_specs, &mut errs);
                if ws.lf_specs.is_file() {
                    match (read_lf_specs(&ws.lf_specs), &classes) {
                        (Err(e), _) => errs.push(format!("ws.lf_specs: {e}")),
                        (Ok(specs), Some(c)) => {
                            if let Err(e) = LfSet::<f64>::compile(&specs, c, Lexicon::bundled()) {
                                errs.push(format!("ws.lf_specs: {e}"));
                            }
                        }
                        _ => {}
                    }
                }
            }
            _ => {}
        }
        match (&self.zeroshot, methods.contains(&MethodKind::Zeroshot)) {
            (None, true) => errs.push("zeroshot: section required when `zeroshot` is a method".into()),
            (Some(zs), _) => {
                if let Err(e) = zs.template() {
                    errs.push(format!("zeroshot.template: {e}"));
                }
                match Verbalizer::new(zs.verbalizer.clone()) {
                    Err(e) => errs.push(format!("zeroshot.verbalizer: {e}")),
                    Ok(v) => {
                        if let Some(c) = &classes {
                            for class in v.classes() {
                                if !c.contains(class) {
                                    errs.push(format!("zeroshot.verbalizer: `{class}` is not a configured class"));
                                }
                            }
                        }
                    }
                }
                if zs.model.trim().is_empty() {
                    errs.push("zeroshot.model: must not be empty".into());
                }
                if zs.max_in_flight == 0 {
                    errs.push("zeroshot.max_in_flight: must be at least 1".into());
                }
                if zs.rate_limit_per_sec.is_some_and(|r| !(r > 0.0)) {
                    errs.push("zeroshot.rate_limit_per_sec: must be positive".into());
                }
                if !(0.0..=2.0).contains(&zs.temperature) || zs.max_tokens == 0 {
                    errs.push("zeroshot: temperature must be in [0, 2] and max_tokens positive".into());
                }
                if !zs.live {
                    match &zs.replay {
                        Some(p) => need_file("zeroshot.replay", p, &mut errs),
                        None => errs.push("zeroshot: set `replay` to a fixture, or `live = true` (or pass --live)".into()),
                    }
                }
            }
            _ => {}
        }
        match (&self.external, methods.contains(&MethodKind::External)) {
            (None, true) => errs.push("external: section required when `external` is a method".into()),
            (Some(ext), true) => {
                if ext.method.trim().is_empty() {
                    errs.push("external.method: must not be empty".into());
                }
                for r in &s.regimes {
                    let p = PathBuf::from(ext.predictions.to_string_lossy().replace("{regime}", r.slug()));
                    need_file("external.predictions", &p, &mut errs);
                }
            }
            _ => {}
        }
        if let Err(e) = PriceTable::new(self.prices.clone()) {
            errs.push(format!("prices: {e}"));
        }
        errs
    }
}
