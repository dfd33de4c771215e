use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// How a reported number was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Series,
    EulerMaclaurin,
    Quadrature,
    Exact,
    Scan,
    Bisection,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::Series => "series",
            Provenance::EulerMaclaurin => "euler-maclaurin",
            Provenance::Quadrature => "quadrature",
            Provenance::Exact => "exact",
            Provenance::Scan => "scan",
            Provenance::Bisection => "bisection",
        }
    }
}

/// One result row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub quantity: String,
    /// Decimal string with the requested number of significant digits, or a label.
    pub value: String,
    pub provenance: Provenance,
    /// `None` for purely informational rows.
    pub pass: Option<bool>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub detail: BTreeMap<String, String>,
}

impl Record {
    pub fn new(id: impl Into<String>, quantity: impl Into<String>, value: impl Into<String>, provenance: Provenance) -> Self {
        Record {
            id: id.into(),
            quantity: quantity.into(),
            value: value.into(),
            provenance,
            pass: None,
            detail: BTreeMap::new(),
        }
    }

    pub fn pass(mut self, pass: bool) -> Self {
        self.pass = Some(pass);
        self
    }

    pub fn detail(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.detail.insert(key.into(), value.into());
        self
    }
}

/// Failure that stopped a command before it could reach a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub operation: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub subcommand: String,
    pub inputs: BTreeMap<String, String>,
    pub results: Vec<Record>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    pub timing: Timing,
}

impl Report {
    /// True when no record failed and no error was raised.
    pub fn compute_pass(results: &[Record], error: &Option<ErrorInfo>) -> bool {
        error.is_none() && results.iter().all(|r| r.pass != Some(false))
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// One record per row under a fixed header; `detail` is flattened to `k=v;k=v`.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(CSV_HEADER)
            .expect("in-memory csv write");
        for r in &self.results {
            let pass = match r.pass {
                Some(true) => "true",
                Some(false) => "false",
                None => "",
            };
            let detail = r
                .detail
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";");
            writer
                .write_record([
                    self.subcommand.as_str(),
                    r.id.as_str(),
                    r.quantity.as_str(),
                    r.value.as_str(),
                    r.provenance.as_str(),
                    pass,
                    detail.as_str(),
                ])
                .expect("in-memory csv write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
    }
}

pub const CSV_HEADER: [&str; 7] = ["subcommand", "id", "quantity", "value", "provenance", "pass", "detail"];

/// Writes `text` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
