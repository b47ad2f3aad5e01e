use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::config::Scenario;
use crate::error::CliResult;
use crate::scenario::RunOutput;

/// Files written for one run.
#[derive(Debug, Clone)]
pub struct RunFiles {
    pub csv: PathBuf,
    pub report: PathBuf,
    pub meta: PathBuf,
}

/// Shortest round-trip decimal form.
pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_csv(path: &Path, columns: &[String], rows: &[Vec<f64>]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(columns)?;
    for r in rows {
        w.write_record(r.iter().map(|v| format_f64(*v)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn report_value(s: &Scenario, out: &RunOutput) -> Value {
    json!({
        "scenario": s,
        "defaults_applied": s.defaults,
        "columns": out.columns,
        "samples": out.rows.len(),
        "diagnostics": out.diagnostics,
    })
}

pub fn write_run(dir: &Path, s: &Scenario, out: &RunOutput, source: Option<&Path>) -> CliResult<RunFiles> {
    fs::create_dir_all(dir)?;
    let files = RunFiles {
        csv: dir.join(format!("{}.csv", s.name)),
        report: dir.join(format!("{}.report.json", s.name)),
        meta: dir.join(format!("{}.meta.json", s.name)),
    };
    write_csv(&files.csv, &out.columns, &out.rows)?;
    fs::write(&files.report, serde_json::to_string_pretty(&report_value(s, out))? + "\n")?;
    let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let meta = json!({
        "tool": "varqdyn",
        "cli_version": env!("CARGO_PKG_VERSION"),
        "core_version": varqdyn::VERSION,
        "created_unix": created,
        "config": source.map(|p| p.display().to_string()),
        "grid": s.grid,
        "seed": Value::Null,
    });
    fs::write(&files.meta, serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(files)
}
