//! Preset reports: assertion list, JSON summary, CSV detail.

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub observed: f64,
    pub bound: f64,
    pub detail: String,
}

impl Assertion {
    /// Passes when `observed >= bound`.
    pub fn at_least(name: &str, observed: f64, bound: f64, detail: impl Into<String>) -> Self {
        Assertion {
            name: name.into(),
            pass: observed >= bound,
            observed,
            bound,
            detail: detail.into(),
        }
    }

    /// Passes when `observed <= bound`.
    pub fn at_most(name: &str, observed: f64, bound: f64, detail: impl Into<String>) -> Self {
        Assertion {
            name: name.into(),
            pass: observed <= bound,
            observed,
            bound,
            detail: detail.into(),
        }
    }

    pub fn holds(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Assertion {
            name: name.into(),
            pass,
            observed: f64::from(u8::from(pass)),
            bound: 1.0,
            detail: detail.into(),
        }
    }
}

/// Rows of the CSV detail file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.rows.push(row.into_iter().map(|c| c.to_string()).collect());
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub preset: String,
    pub config: Value,
    pub assertions: Vec<Assertion>,
    pub results: Value,
    pub detail: Table,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    /// Deterministic summary, then a `metadata` object holding the wall-clock
    /// timestamp and elapsed time (the only fields that differ between runs).
    pub fn summary_json(&self, metadata: Option<Value>) -> String {
        let mut summary = serde_json::json!({
            "preset": self.preset,
            "config": self.config,
            "passed": self.passed(),
            "assertions": self.assertions,
            "results": self.results,
        });
        if let Some(m) = metadata {
            summary["metadata"] = m;
        }
        let mut s = serde_json::to_string_pretty(&summary).expect("plain values");
        s.push('\n');
        s
    }
}
