//! Reports: per-point records with bound checks, plus provenance, and their
//! CSV, JSON and gnuplot renderings.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Non-finite floats are written as strings so JSON output always parses.
mod float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&v.to_string())
        }
    }

    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `value <= bound`
    Le,
    /// `value < bound`
    Lt,
    /// `value >= bound`
    Ge,
}

/// One comparison of a measured value against a bound. `margin` is the
/// signed slack, positive when the relation holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(with = "float")]
    pub value: f64,
    #[serde(with = "float")]
    pub bound: f64,
    pub relation: Relation,
    pub passed: bool,
    #[serde(with = "float")]
    pub margin: f64,
    /// Informational checks are recorded but never fail a report.
    pub enforced: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, bound: f64) -> Self {
        let (passed, margin) = match relation {
            Relation::Le => (value <= bound, bound - value),
            Relation::Lt => (value < bound, bound - value),
            Relation::Ge => (value >= bound, value - bound),
        };
        Check { name: name.into(), value, bound, relation, passed, margin, enforced: true }
    }

    pub fn le(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check::new(name, value, Relation::Le, bound)
    }

    pub fn lt(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check::new(name, value, Relation::Lt, bound)
    }

    pub fn ge(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check::new(name, value, Relation::Ge, bound)
    }

    /// Marks the check as informational.
    pub fn reported(mut self) -> Self {
        self.enforced = false;
        self
    }

    pub fn failed(&self) -> bool {
        self.enforced && !self.passed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub key: String,
    #[serde(with = "float")]
    pub value: f64,
}

/// One grid point: its inputs and measurements as ordered key/value pairs,
/// and the checks made there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub suite: String,
    pub label: String,
    pub values: Vec<Entry>,
    pub checks: Vec<Check>,
}

impl Record {
    pub fn new(suite: impl Into<String>, label: impl Into<String>) -> Self {
        Record { suite: suite.into(), label: label.into(), values: Vec::new(), checks: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.push(key, value);
        self
    }

    pub fn push(&mut self, key: &str, value: f64) {
        self.values.push(Entry { key: key.to_string(), value });
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.iter().find(|e| e.key == key).map(|e| e.value)
    }

    pub fn passed(&self) -> bool {
        !self.checks.iter().any(Check::failed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// SHA-256 of the spec file bytes, when a spec was used.
    pub spec_sha256: Option<String>,
}

impl Provenance {
    pub fn new(command: &str, seed: u64, spec_sha256: Option<String>) -> Self {
        Provenance {
            tool: "hamsim".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            spec_sha256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub provenance: Provenance,
    pub records: Vec<Record>,
    /// Caveats attached by the producer, such as cost units.
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>, provenance: Provenance) -> Self {
        Report { title: title.into(), provenance, records: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(Record::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = (&Record, &Check)> {
        self.records
            .iter()
            .flat_map(|r| r.checks.iter().filter(|c| c.failed()).map(move |c| (r, c)))
    }

    /// Records of one suite.
    pub fn suite<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
        self.records.iter().filter(move |r| r.suite == name)
    }

    pub fn extend(&mut self, other: Report) {
        self.records.extend(other.records);
        for n in other.notes {
            if !self.notes.contains(&n) {
                self.notes.push(n);
            }
        }
    }

    /// Value columns in first-seen order.
    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = Vec::new();
        for r in &self.records {
            for e in &r.values {
                if !cols.contains(&e.key) {
                    cols.push(e.key.clone());
                }
            }
        }
        cols
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Report> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })
    }

    /// One row per record: `suite,label,<values...>,passed`.
    pub fn to_csv(&self) -> Result<String> {
        let cols = self.columns();
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Config(e.to_string());
        let mut header = vec!["suite".to_string(), "label".to_string()];
        header.extend(cols.iter().cloned());
        header.push("passed".into());
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.records {
            let mut row = vec![r.suite.clone(), r.label.clone()];
            row.extend(cols.iter().map(|c| r.get(c).map(|v| v.to_string()).unwrap_or_default()));
            row.push(r.passed().to_string());
            w.write_record(&row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
    }

    /// Whitespace columns for gnuplot, with a `#` header naming each column.
    /// Missing values are `nan`; `passed` is 1 or 0.
    pub fn to_plotdata(&self) -> String {
        let cols = self.columns();
        let mut out = String::from("# suite label");
        for c in &cols {
            out.push(' ');
            out.push_str(&c.replace(char::is_whitespace, "_"));
        }
        out.push_str(" passed\n");
        for r in &self.records {
            out.push_str(&r.suite.replace(char::is_whitespace, "_"));
            out.push(' ');
            let label = r.label.replace(char::is_whitespace, "_");
            out.push_str(if label.is_empty() { "-" } else { &label });
            for c in &cols {
                out.push(' ');
                out.push_str(&r.get(c).map(|v| v.to_string()).unwrap_or_else(|| "nan".into()));
            }
            out.push_str(if r.passed() { " 1\n" } else { " 0\n" });
        }
        out
    }

    /// A short human summary: one line per suite.
    pub fn summary(&self) -> String {
        let mut suites: Vec<&str> = Vec::new();
        for r in &self.records {
            if !suites.contains(&r.suite.as_str()) {
                suites.push(&r.suite);
            }
        }
        let mut out = String::new();
        for s in suites {
            let recs: Vec<&Record> = self.suite(s).collect();
            let failed = recs.iter().filter(|r| !r.passed()).count();
            let status = if failed == 0 { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {s}: {} points, {failed} failing\n", recs.len()));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Plotdata,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Plotdata => "dat",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Plotdata => "plotdata",
        })
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "plotdata" => Ok(Format::Plotdata),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}` (csv, json, plotdata)"))),
        }
    }
}

pub fn render(report: &Report, format: Format) -> Result<String> {
    if report.records.is_empty() {
        return Err(Error::InvalidArgument("report has no records".into()));
    }
    match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
        Format::Plotdata => Ok(report.to_plotdata()),
    }
}

/// Writes `<dir>/<stem>.<ext>` and returns its path.
pub fn emit(report: &Report, format: Format, dir: &Path, stem: &str) -> Result<PathBuf> {
    let text = render(report, format)?;
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{stem}.{}", format.extension()));
    std::fs::write(&path, text)?;
    Ok(path)
}

pub fn load_report(path: &Path) -> Result<Report> {
    Report::from_json(&std::fs::read_to_string(path)?)
}
