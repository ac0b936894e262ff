use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CliError, Command, RunConfig};

/// Everything needed to re-execute a command: the fully resolved config (absolute
/// paths, overrides applied), the command itself, plus provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub config: Option<RunConfig>,
    pub seeds: Vec<u64>,
    pub started_at: String,
    pub finished_at: String,
    pub failed_cells: usize,
    pub outputs: Vec<OutputFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Relative to the output directory.
    pub path: String,
    pub sha256: String,
}

impl OutputFile {
    pub fn hash(out_dir: &Path, path: &Path) -> Result<Self, CliError> {
        let bytes = fs::read(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let digest = Sha256::digest(&bytes);
        Ok(Self {
            path: path.strip_prefix(out_dir).unwrap_or(path).to_string_lossy().into_owned(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        })
    }
}

impl RunManifest {
    pub fn file_name(command: &Command) -> String {
        format!("manifest-{}.json", command.name())
    }

    pub fn write(&self, out_dir: &Path) -> Result<PathBuf, CliError> {
        let path = out_dir.join(Self::file_name(&self.command));
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&path, json + "\n").map_err(|source| CliError::Io { path: path.clone(), source })?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Manifest {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}
