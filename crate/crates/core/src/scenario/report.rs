//! Persisting run results: per-check JSON and CSV files, a manifest, and a
//! plain-text summary table.

use super::run::RunOutcome;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub const MANIFEST_SCHEMA: &str = "kkgreen/manifest@1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Both,
}

impl OutputFormat {
    fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }

    fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckEntry {
    pub check: String,
    pub passed: bool,
    pub error: Option<String>,
    pub files: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub scenario: String,
    /// SHA-256 of the scenario file.
    pub digest: String,
    pub tool_version: String,
    /// Seconds since the Unix epoch. The only time-dependent field; report
    /// files never contain it.
    pub timestamp: u64,
    pub deterministic: bool,
    pub warnings: Vec<String>,
    pub checks: Vec<CheckEntry>,
    pub passed: bool,
    pub files: Vec<String>,
}

/// Write reports into `dir` (created if missing) and return the manifest,
/// which is also written as `manifest.json`.
pub fn emit_reports(outcome: &RunOutcome, dir: &Path, format: OutputFormat) -> Result<RunManifest> {
    std::fs::create_dir_all(dir).map_err(|e| unwritable(dir, e))?;
    let write = |name: &str, body: &str| -> Result<String> {
        let path: PathBuf = dir.join(name);
        std::fs::write(&path, body).map_err(|e| unwritable(&path, e))?;
        Ok(name.to_string())
    };
    let mut files = Vec::new();
    let mut checks = Vec::new();
    for r in &outcome.reports {
        let mut own = Vec::new();
        if format.json() {
            own.push(write(&format!("{}.json", r.check), &(serde_json::to_string_pretty(r)? + "\n"))?);
        }
        if format.csv() {
            for (suffix, body) in &r.csv {
                own.push(write(&format!("{suffix}.csv"), body)?);
            }
        }
        files.extend(own.iter().cloned());
        checks.push(CheckEntry { check: r.check.clone(), passed: r.passed, error: r.error.clone(), files: own });
    }
    files.push(write("scenario.resolved.json", &(serde_json::to_string_pretty(&outcome.scenario)? + "\n"))?);
    let manifest = RunManifest {
        schema: MANIFEST_SCHEMA.into(),
        scenario: outcome.scenario.name.clone(),
        digest: outcome.digest.clone(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        deterministic: outcome.scenario.settings.deterministic,
        warnings: outcome.warnings.clone(),
        checks,
        passed: outcome.passed(),
        files,
    };
    write("manifest.json", &(serde_json::to_string_pretty(&manifest)? + "\n"))?;
    Ok(manifest)
}

fn unwritable(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("cannot write {}: {e}", path.display())))
}

/// Human-readable table: one row per check with its headline metrics.
pub fn summary_table(outcome: &RunOutcome) -> String {
    let mut s = format!("scenario {} ({})\n", outcome.scenario.name, &outcome.digest[..12.min(outcome.digest.len())]);
    for w in &outcome.warnings {
        s.push_str(&format!("warning: {w}\n"));
    }
    s.push_str(&format!("{:<14} {:<6} {}\n", "check", "status", "metrics"));
    for r in &outcome.reports {
        let status = if r.passed { "PASS" } else { "FAIL" };
        let body = match &r.error {
            Some(e) => format!("error: {e}"),
            None => r.metrics.iter().map(|(k, v)| format!("{k}={v:.3e}")).collect::<Vec<_>>().join(" "),
        };
        s.push_str(&format!("{:<14} {:<6} {}\n", r.check, status, body));
    }
    s.push_str(if outcome.passed() { "all checks passed\n" } else { "some checks failed\n" });
    s
}
