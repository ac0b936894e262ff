use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{write_corpus_jsonl, BalanceMode, Corpus, CorpusError};

/// Provenance record for the subset files written by a sampling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub dataset: String,
    pub entries: Vec<SplitEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitEntry {
    pub split: String,
    /// Relative to the manifest's directory.
    pub path: String,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    pub mode: Option<BalanceMode>,
    pub n_docs: usize,
    pub class_counts: [usize; 2],
    /// SHA-256 over the newline-joined document ids.
    pub ids_sha256: String,
}

pub fn ids_digest(corpus: &Corpus) -> String {
    let mut h = Sha256::new();
    for id in corpus.ids() {
        h.update(id.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Budget series for one (balance mode, seed) pair.
pub type SeedSeries<'a> = (BalanceMode, u64, &'a [(usize, Corpus)]);

/// Writes every corpus as JSON Lines under `out_dir` plus `split_manifest.json`.
///
/// `fixed` holds whole splits (`train`, `test`, `exploration`, ...) with the seed that
/// produced them; `series` holds budget subsets grouped by balance mode and plan seed.
pub fn write_split_artifacts(
    out_dir: &Path,
    dataset: &str,
    fixed: &[(&str, &Corpus, Option<u64>)],
    series: &[SeedSeries<'_>],
) -> Result<SplitManifest, CorpusError> {
    let io = |source| CorpusError::Io {
        path: out_dir.to_path_buf(),
        source,
    };
    fs::create_dir_all(out_dir).map_err(io)?;
    let mut entries = Vec::new();
    for (split, corpus, seed) in fixed {
        let rel = format!("{split}.jsonl");
        write_corpus_jsonl(corpus, &out_dir.join(&rel))?;
        entries.push(SplitEntry {
            split: (*split).to_owned(),
            path: rel,
            seed: *seed,
            budget: None,
            mode: None,
            n_docs: corpus.len(),
            class_counts: corpus.class_counts(),
            ids_sha256: ids_digest(corpus),
        });
    }
    for (mode, seed, subsets) in series {
        let mode_name = match mode {
            BalanceMode::Balanced => "balanced",
            BalanceMode::Natural => "natural",
        };
        let dir = format!("budgets/{mode_name}/seed{seed}");
        fs::create_dir_all(out_dir.join(&dir)).map_err(io)?;
        for (budget, corpus) in subsets.iter() {
            let rel = format!("{dir}/b{budget}.jsonl");
            write_corpus_jsonl(corpus, &out_dir.join(&rel))?;
            entries.push(SplitEntry {
                split: "budget".to_owned(),
                path: rel,
                seed: Some(*seed),
                budget: Some(*budget),
                mode: Some(*mode),
                n_docs: corpus.len(),
                class_counts: corpus.class_counts(),
                ids_sha256: ids_digest(corpus),
            });
        }
    }
    let manifest = SplitManifest {
        dataset: dataset.to_owned(),
        entries,
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| CorpusError::Serialize(e.to_string()))?;
    fs::write(out_dir.join("split_manifest.json"), json + "\n").map_err(io)?;
    Ok(manifest)
}
