use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One reported number. `slice` is `axis=value` for diagnostic rows and
/// absent for overall rows; `variant` is `-` when a metric has none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub metric: String,
    pub k: usize,
    pub variant: String,
    pub value: f64,
    pub n_queries: usize,
    pub skipped: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice: Option<String>,
}

impl ReportEntry {
    pub fn new(metric: impl Into<String>, k: usize, variant: impl Into<String>, value: f64, n_queries: usize, skipped: usize) -> Self {
        Self { metric: metric.into(), k, variant: variant.into(), value, n_queries, skipped, slice: None }
    }

    pub fn with_slice(mut self, slice: impl Into<String>) -> Self {
        self.slice = Some(slice.into());
        self
    }
}

/// Ordered list of report entries; serialized as a bare JSON array.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EvalReport {
    pub entries: Vec<ReportEntry>,
}

impl EvalReport {
    pub fn push(&mut self, entry: ReportEntry) {
        self.entries.push(entry);
    }

    pub fn extend(&mut self, other: EvalReport) {
        self.entries.extend(other.entries);
    }

    /// First overall (unsliced) entry with the given metric name.
    pub fn overall(&self, metric: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.metric == metric && e.slice.is_none())
    }

    pub fn sliced(&self, metric: &str, slice: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.metric == metric && e.slice.as_deref() == Some(slice))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Json,
    Tsv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table" | "text" => Ok(ReportFormat::Table),
            "json" => Ok(ReportFormat::Json),
            "tsv" => Ok(ReportFormat::Tsv),
            other => Err(Error::invalid(format!("unknown report format `{other}`"))),
        }
    }
}

const COLUMNS: [&str; 7] = ["metric", "k", "variant", "slice", "value", "n_queries", "skipped"];

fn cells(e: &ReportEntry, value: String) -> [String; 7] {
    [
        e.metric.clone(),
        e.k.to_string(),
        e.variant.clone(),
        e.slice.clone().unwrap_or_else(|| "-".into()),
        value,
        e.n_queries.to_string(),
        e.skipped.to_string(),
    ]
}

/// Renders deterministically. TSV values use the shortest round-trip float
/// form, the table rounds to six decimals.
pub fn render_report(report: &EvalReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Tsv => {
            let mut s = COLUMNS.join("\t");
            s.push('\n');
            for e in &report.entries {
                s.push_str(&cells(e, e.value.to_string()).join("\t"));
                s.push('\n');
            }
            s
        }
        ReportFormat::Table => {
            let rows: Vec<[String; 7]> = report.entries.iter().map(|e| cells(e, format!("{:.6}", e.value))).collect();
            let mut widths = COLUMNS.map(str::len);
            for row in &rows {
                for (w, c) in widths.iter_mut().zip(row) {
                    *w = (*w).max(c.chars().count());
                }
            }
            let mut s = String::new();
            let mut line = |row: &[String]| {
                let mut out = String::new();
                for (i, (c, w)) in row.iter().zip(widths).enumerate() {
                    // text columns left-aligned, numbers right-aligned
                    if matches!(i, 0 | 2 | 3) {
                        let _ = write!(out, "{c:<w$}");
                    } else {
                        let _ = write!(out, "{c:>w$}");
                    }
                    if i + 1 < row.len() {
                        out.push_str("  ");
                    }
                }
                s.push_str(out.trim_end());
                s.push('\n');
            };
            line(&COLUMNS.map(String::from));
            for row in &rows {
                line(row);
            }
            s
        }
    }
}
