//! Report assembly, rendering and re-ingest.
//!
//! Every report is `{meta, records, summary}`. Records are flat JSON objects;
//! the summary counts the `verdict` values and the records with `"pass": false`,
//! so it can always be recomputed from the records alone.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::affine1::{ScanRecord, Summary};
use crate::error::{Error, Result};
use crate::verdict::VerdictKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s {
            "table" => Ok(Format::Table),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::domain(format!("unknown format {s:?}"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Table => "table",
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub config: Value,
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: Meta,
    pub records: Vec<Value>,
    pub summary: Summary,
}

/// A scan record with the outcome of its classification check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    #[serde(flatten)]
    pub record: ScanRecord,
    pub pass: bool,
}

/// Counts verdicts and failed checks.
pub fn summarize(records: &[Value]) -> Summary {
    let mut s = Summary::default();
    for r in records {
        match r.get("verdict").and_then(|v| serde_json::from_value::<VerdictKind>(v.clone()).ok()) {
            Some(VerdictKind::Basic) => s.basic += 1,
            Some(VerdictKind::NonBasic) => s.nonbasic += 1,
            Some(VerdictKind::NotApplicable) => s.notapplicable += 1,
            None => {}
        }
        if r.get("pass") == Some(&Value::Bool(false)) {
            s.failures += 1;
        }
    }
    s
}

impl Report {
    pub fn new<T: Serialize>(config: Value, timestamp: Option<String>, records: &[T]) -> Result<Report> {
        let records: Vec<Value> = records
            .iter()
            .map(serde_json::to_value)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::contract(format!("record serialization: {e}")))?;
        if let Some(bad) = records.iter().position(|r| !r.is_object()) {
            return Err(Error::contract(format!("record {bad} is not an object")));
        }
        Ok(Report {
            meta: Meta {
                version: env!("CARGO_PKG_VERSION").to_string(),
                config,
                timestamp,
            },
            summary: summarize(&records),
            records,
        })
    }

    /// Whether the stored summary matches the records.
    pub fn summary_consistent(&self) -> bool {
        summarize(&self.records) == self.summary
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self)
                    .map_err(|e| Error::contract(format!("report serialization: {e}")))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.render_csv(),
            Format::Table => Ok(self.render_table()),
        }
    }

    /// Column names in first-seen order.
    fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = Vec::new();
        for r in &self.records {
            if let Value::Object(m) = r {
                for k in m.keys() {
                    if !cols.contains(k) {
                        cols.push(k.clone());
                    }
                }
            }
        }
        cols
    }

    fn cells(&self, cols: &[String]) -> Vec<Vec<String>> {
        let empty = Map::new();
        self.records
            .iter()
            .map(|r| {
                let m = r.as_object().unwrap_or(&empty);
                cols.iter().map(|c| cell(m.get(c))).collect()
            })
            .collect()
    }

    fn render_csv(&self) -> Result<String> {
        let cols = self.columns();
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::contract(format!("csv: {e}"));
        if !cols.is_empty() {
            w.write_record(&cols).map_err(io)?;
        }
        for row in self.cells(&cols) {
            w.write_record(&row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::contract(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::contract(format!("csv: {e}")))
    }

    fn render_table(&self) -> String {
        let cols = self.columns();
        let rows = self.cells(&cols);
        let mut widths: Vec<usize> = cols.iter().map(|c| c.chars().count()).collect();
        for row in &rows {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |row: &[String]| {
            let padded: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:<w$}"))
                .collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = String::new();
        if !cols.is_empty() {
            out.push_str(&line(&cols));
            let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
            out.push_str(&line(&rule));
        }
        for row in &rows {
            out.push_str(&line(row));
        }
        let s = &self.summary;
        out.push_str(&format!(
            "basic={} nonbasic={} notapplicable={} failures={}\n",
            s.basic, s.nonbasic, s.notapplicable, s.failures
        ));
        out
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

/// Reads a JSON report back.
pub fn parse_report_json(text: &str) -> Result<Report> {
    let report: Report = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    if let Some(bad) = report.records.iter().position(|r| !r.is_object()) {
        return Err(Error::parse(1, format!("record {bad} is not an object")));
    }
    Ok(report)
}
