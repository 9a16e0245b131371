//! Self-describing result records and their CSV/JSON persistence.
//!
//! Emission is deterministic: rows sort by (suite, check), floats print in
//! shortest round-trip form, and JSON keys follow a fixed order. Verdicts
//! are encoded numerically (1 matched / 0 not) so records never carry
//! non-finite values.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str = "suite,check,status,value,expected,tolerance,runtime_ms";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
        })
    }
}

/// One check outcome. The seven leading fields form the CSV projection; the
/// details map carries the inputs echo and the thresholds in force, so a
/// record can be interpreted without external context.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub suite: String,
    pub check: String,
    pub status: CheckStatus,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub runtime_ms: u64,
    #[serde(default)]
    pub details: BTreeMap<String, String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<OutputFormat> {
        match s {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

fn sorted(records: &[ResultRecord]) -> Vec<&ResultRecord> {
    let mut refs: Vec<&ResultRecord> = records.iter().collect();
    refs.sort_by(|a, b| (&a.suite, &a.check).cmp(&(&b.suite, &b.check)));
    refs
}

pub fn render_csv(records: &[ResultRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in sorted(records) {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.suite, r.check, r.status, r.value, r.expected, r.tolerance, r.runtime_ms
        ));
    }
    out
}

pub fn render_json(records: &[ResultRecord]) -> String {
    let refs = sorted(records);
    let mut out = serde_json::to_string_pretty(&refs).expect("records serialize");
    out.push('\n');
    out
}

/// Writes records to `path` in the chosen format.
pub fn emit_report(
    records: &[ResultRecord],
    format: OutputFormat,
    path: &Path,
) -> std::io::Result<()> {
    let body = match format {
        OutputFormat::Csv => render_csv(records),
        OutputFormat::Json => render_json(records),
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut file = fs::File::create(path)?;
    file.write_all(body.as_bytes())
}

/// Parses the CSV projection back into records (details are not in CSV).
pub fn parse_csv_report(text: &str) -> Result<Vec<ResultRecord>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(format!("bad CSV header: {other:?}")),
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(format!("row {i}: expected 7 fields, got {}", fields.len()));
        }
        let status = match fields[2] {
            "pass" => CheckStatus::Pass,
            "fail" => CheckStatus::Fail,
            other => return Err(format!("row {i}: bad status `{other}`")),
        };
        let num = |s: &str, what: &str| -> Result<f64, String> {
            s.parse::<f64>()
                .map_err(|e| format!("row {i}: bad {what}: {e}"))
        };
        records.push(ResultRecord {
            suite: fields[0].to_string(),
            check: fields[1].to_string(),
            status,
            value: num(fields[3], "value")?,
            expected: num(fields[4], "expected")?,
            tolerance: num(fields[5], "tolerance")?,
            runtime_ms: fields[6]
                .parse()
                .map_err(|e| format!("row {i}: bad runtime: {e}"))?,
            details: BTreeMap::new(),
        });
    }
    Ok(records)
}

pub fn parse_json_report(text: &str) -> Result<Vec<ResultRecord>, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}
