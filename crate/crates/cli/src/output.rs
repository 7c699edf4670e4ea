//! Atomic result files: the manifest as JSON, a CSV summary or attack curve,
//! and JSON-lines transcripts.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use revoqsim_core::harness::GameTranscript;

use crate::config::{Experiment, Format};
use crate::run::RunOutput;

/// Writes `bytes` to a temporary file next to `path`, then renames it over
/// `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

pub fn transcripts_jsonl(transcripts: &[GameTranscript]) -> String {
    let mut s = String::new();
    for t in transcripts {
        s.push_str(&t.to_json_line());
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    experiment: &'a str,
    params: &'a str,
    label: &'a str,
    strategy: &'a str,
    trials: u64,
    wins: u64,
    p_hat: f64,
    ci_lo: f64,
    ci_hi: f64,
    mean_queries: f64,
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(w.into_inner()?)
}

/// The summary table, or the attack curve for the sponge experiment.
pub fn summary_csv(run: &RunOutput) -> Result<Vec<u8>> {
    let m = &run.manifest;
    if m.config.experiment == Experiment::Sponge {
        return csv_bytes(&run.curve);
    }
    let params = m.config.params_line();
    csv_bytes(m.results.iter().map(|r| SummaryRow {
        experiment: m.config.experiment.name(),
        params: &params,
        label: &r.label,
        strategy: &r.strategy,
        trials: r.trials,
        wins: r.wins,
        p_hat: r.p_hat,
        ci_lo: r.ci_lo,
        ci_hi: r.ci_hi,
        mean_queries: r.mean_queries,
    }))
}

pub fn manifest_json(run: &RunOutput) -> Result<String> {
    Ok(serde_json::to_string_pretty(&run.manifest)?)
}

/// Writes whatever the config asked for.
pub fn persist(run: &RunOutput) -> Result<()> {
    let cfg = &run.manifest.config;
    if let Some(path) = &cfg.out {
        let bytes = match cfg.format {
            Format::Json => manifest_json(run)?.into_bytes(),
            Format::Csv => summary_csv(run)?,
        };
        write_atomic(path, &bytes)?;
    }
    if let Some(path) = &cfg.transcripts {
        write_atomic(path, transcripts_jsonl(&run.transcripts).as_bytes())?;
    }
    Ok(())
}
