//! One result, four renderings.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{json, Value};

/// Version of the JSON envelope layout.
pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
    Markdown,
}

/// Everything a subcommand produces. `passed` is false when the command ran
/// but its checks failed, which maps to exit code 1.
pub struct Output {
    pub command: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub diagnostics: Value,
    pub human: String,
    pub markdown: String,
    /// Header first.
    pub csv: Vec<Vec<String>>,
    pub passed: bool,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Human => self.human.clone(),
            Format::Markdown => self.markdown.clone(),
            Format::Json => {
                let envelope = json!({
                    "schema": SCHEMA,
                    "command": self.command,
                    "inputs": self.inputs,
                    "results": self.results,
                    "diagnostics": self.diagnostics,
                });
                let mut text = serde_json::to_string_pretty(&envelope).expect("values serialize");
                text.push('\n');
                text
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for row in &self.csv {
                    w.write_record(row).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
            }
        }
    }
}

/// Markdown table from a header and rows of cells.
pub fn markdown_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
    for row in rows {
        let _ = writeln!(out, "| {} |", row.join(" | "));
    }
    out
}

pub fn strings<const N: usize>(cells: [&str; N]) -> Vec<String> {
    cells.iter().map(|s| s.to_string()).collect()
}
