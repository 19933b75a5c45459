use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::{RunConfig, FORMAT_VERSION};
use crate::error::CliError;
use crate::experiment::{Report, Table};

pub fn render_csv(table: &Table) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::new(crate::error::Category::Io, e.to_string());
    w.write_record(&table.header).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|c| c.render())).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io("csv buffer", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn sidecar(cfg: &RunConfig, report: &Report, csv: &Path) -> Value {
    json!({
        "format_version": FORMAT_VERSION,
        "kind": cfg.kind.name(),
        "csv": csv.file_name().map(|s| s.to_string_lossy().into_owned()),
        "config": cfg.to_json(),
        "derived": report.derived,
        "metrics": report.metrics,
    })
}

/// Writes the CSV, then the sidecar.
pub fn write(cfg: &RunConfig, report: &Report, csv: &Path) -> Result<PathBuf, CliError> {
    let text = render_csv(&report.table)?;
    let json_path = sidecar_path(csv);
    let doc = serde_json::to_string_pretty(&sidecar(cfg, report, csv))
        .expect("sidecar serialises");
    fs::write(csv, text).map_err(|e| CliError::io(&csv.display().to_string(), e))?;
    fs::write(&json_path, doc + "\n")
        .map_err(|e| CliError::io(&json_path.display().to_string(), e))?;
    Ok(json_path)
}
