use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::config::Config;

/// One CSV file. The first line is `# schema: <schema>`, then a header row.
pub struct Table {
    pub file: String,
    pub schema: &'static str,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: impl Into<String>, schema: &'static str, header: &[&str]) -> Self {
        Self {
            file: file.into(),
            schema,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

pub struct Report {
    pub command: &'static str,
    pub tables: Vec<Table>,
    pub resolved: serde_json::Value,
}

fn write_table(dir: &Path, t: &Table) -> std::io::Result<PathBuf> {
    let path = dir.join(&t.file);
    let mut f = File::create(&path)?;
    writeln!(f, "# schema: {}", t.schema)?;
    let mut w = csv::Writer::from_writer(f);
    w.write_record(&t.header)?;
    for r in &t.rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(path)
}

/// Writes every table plus `<command>.manifest.json`; returns the paths written.
pub fn write_report(dir: &Path, report: &Report, cfg: &Config) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for t in &report.tables {
        paths.push(write_table(dir, t)?);
    }
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "tool_version": env!("CARGO_PKG_VERSION"),
        "core_version": attocell::VERSION,
        "command": report.command,
        "outputs": report.tables.iter().map(|t| json!({
            "file": t.file,
            "schema": t.schema,
            "rows": t.rows.len(),
        })).collect::<Vec<_>>(),
        "config": cfg.to_json(),
        "resolved": report.resolved,
    });
    let path = dir.join(format!(
        "{}.manifest.json",
        report.command.replace('-', "_")
    ));
    let mut f = File::create(&path)?;
    serde_json::to_writer_pretty(&mut f, &manifest)?;
    writeln!(f)?;
    paths.push(path);
    Ok(paths)
}
