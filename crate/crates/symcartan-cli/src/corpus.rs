//! Batch runner over a directory of problem files.

use std::path::{Path, PathBuf};

use crate::problem::ProblemFile;
use crate::report::Report;
use crate::{run_problem, CliError, RunOptions};

/// The fixture directory shipped with the workspace.
pub fn default_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures"))
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub report: Report,
}

/// Runs every `*.json` problem file under `dir` (sorted by name), keeping
/// only those whose stem contains `filter` when one is given.
pub fn run_corpus(
    dir: &Path,
    filter: Option<&str>,
    opts: &RunOptions,
) -> Result<Vec<CorpusEntry>, CliError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::schema(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("json"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for path in paths {
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        if let Some(f) = filter {
            if !name.contains(f) {
                continue;
            }
        }
        let file = ProblemFile::from_path(&path)?;
        let report = run_problem(&file, opts)
            .map_err(|e| CliError::computation(format!("{name}: {}", e.message())))?;
        out.push(CorpusEntry { name, report });
    }
    if out.is_empty() {
        return Err(CliError::schema(match filter {
            Some(f) => format!("no problem files matching {f:?} in {}", dir.display()),
            None => format!("no problem files in {}", dir.display()),
        }));
    }
    Ok(out)
}
