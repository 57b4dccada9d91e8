use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::args::{Format, Mode};
use crate::CliError;

/// Everything needed to rerun a command: embedded in every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    pub mode: Mode,
    pub format: Format,
    pub out: Option<String>,
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Extra `# key: value` lines after the standard ones.
    pub notes: Vec<String>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|h| h.to_string()).collect(),
            ..CsvTable::default()
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Shortest decimal that reads back as the same double.
pub fn num(v: f64) -> String {
    let s = format!("{v}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub const PRECISION_NOTE: &str = "doubles in shortest round-trip decimal form; exact values as n/d";

pub fn render_csv(cfg: &RunConfig, table: &CsvTable) -> Result<String, CliError> {
    let mut text = String::new();
    text.push_str(&format!("# schema_version: {}\n", ruinlab::SCHEMA_VERSION));
    text.push_str(&format!("# config: {}\n", serde_json::to_string(cfg).expect("config serializes")));
    text.push_str(&format!("# precision: {PRECISION_NOTE}\n"));
    for note in &table.notes {
        text.push_str(&format!("# {note}\n"));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    let body = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    text.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(text)
}

pub fn render_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
