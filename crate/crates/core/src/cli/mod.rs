//! Command-line entry point: config-driven ingestion, sampling, LF reports, single runs,
//! learning curves and cost estimates, each leaving a manifest that can replay it.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use commands::execute;
pub use config::{
    ClassesConfig, DataConfig, ExternalConfig, MethodKind, NbConfig, RunConfig, RunSection, SamplingConfig, WsConfig,
    ZeroShotConfig, DEFAULT_ENDPOINT,
};
pub use manifest::{OutputFile, RunManifest};

use crate::eval::Regime;

#[derive(Debug, Parser)]
#[command(name = "cheaplearn", version, about = "Budgeted text classification: weak supervision, naive Bayes and zero-shot prompting")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct GlobalArgs {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Parallel curve cells (0 = one per core).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Run a single seed instead of the configured list.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Replay fixture for zero-shot responses; disables live calls.
    #[arg(long, global = true, conflicts_with = "live")]
    pub replay: Option<PathBuf>,
    /// Send zero-shot prompts to the configured endpoint (key from CHEAPLEARN_API_KEY).
    #[arg(long, global = true)]
    pub live: bool,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Validate the configured corpora and write normalised copies with length statistics.
    Ingest,
    /// Write the exploration set and nested budget subsets for every seed, with a split manifest.
    Sample,
    /// Coverage, overlap and accuracy of each labelling function on the exploration set.
    LfReport,
    /// Train and evaluate one method at a single budget for every seed.
    Run {
        method: MethodKind,
        /// Defaults to the first configured regime.
        #[arg(long)]
        regime: Option<Regime>,
        /// Defaults to the largest configured budget.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Learning curves over every budget, seed, method and regime.
    Curve {
        /// Restrict to these methods (repeatable).
        #[arg(long = "method")]
        methods: Vec<MethodKind>,
        /// Restrict to these regimes (repeatable).
        #[arg(long = "regime")]
        regimes: Vec<Regime>,
    },
    /// Estimate API spend for classifying a corpus.
    Cost {
        /// Defaults to the zero-shot model of the config.
        #[arg(long)]
        model: Option<String>,
        /// JSONL or CSV with a `text` field; defaults to the configured test set.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Count the rendered prompt of this bundled template instead of the raw text.
        #[arg(long)]
        template: Option<String>,
    },
    /// Check the config and report every problem; writes nothing.
    ValidateConfig,
    /// Re-execute the command recorded in a run manifest.
    Rerun { manifest: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest => "ingest",
            Command::Sample => "sample",
            Command::LfReport => "lf-report",
            Command::Run { .. } => "run",
            Command::Curve { .. } => "curve",
            Command::Cost { .. } => "cost",
            Command::ValidateConfig => "validate-config",
            Command::Rerun { .. } => "rerun",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", format_list(.0))]
    Config(Vec<String>),
    #[error("{0}")]
    Usage(String),
    #[error("cannot parse config {path}: {message}")]
    ParseConfig { path: PathBuf, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
    #[error(transparent)]
    WeakSup(#[from] crate::weaksup::WeakSupError),
    #[error(transparent)]
    Baseline(#[from] crate::baseline::BaselineError),
    #[error(transparent)]
    Prompt(#[from] crate::promptzero::PromptError),
    #[error(transparent)]
    Eval(#[from] crate::eval::EvalError),
    #[error("{0} cell(s) failed")]
    CellFailures(usize),
}

fn format_list(items: &[String]) -> String {
    items.iter().map(|e| format!("  - {e}")).collect::<Vec<_>>().join("\n")
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::ParseConfig { .. } | CliError::Usage(_) => 2,
            CliError::CellFailures(_) => 3,
            _ => 1,
        }
    }
}

/// Parses `std::env::args`, runs the command and maps the result to an exit code.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
