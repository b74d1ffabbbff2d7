//! Command reports and their byte-stable renderings.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::Write;
use std::path::Path;

use glslab_core::verify::VerificationReport;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// Summary lines, the table as CSV, then one line per check.
    Text,
    Csv,
    /// Pretty JSON with sorted keys.
    Structured,
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub summary: BTreeMap<String, String>,
    pub table: Option<Table>,
    pub checks: Vec<VerificationReport>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report { command, summary: BTreeMap::new(), table: None, checks: Vec::new() }
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        self.summary.insert(key.to_string(), value.to_string());
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| !c.passed())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Csv => self.csv(),
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(&self.json()).expect("string keys");
                s.push('\n');
                s
            }
        }
    }

    fn json(&self) -> Value {
        let table = self.table.as_ref().map(|t| json!({ "header": t.header, "rows": t.rows }));
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({ "check": c.check, "outcome": c.outcome.to_string(), "details": c.details }))
            .collect();
        json!({ "command": self.command, "summary": self.summary, "table": table, "checks": checks })
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        if let Some(t) = &self.table {
            w.write_record(&t.header).unwrap();
            for r in &t.rows {
                w.write_record(r).unwrap();
            }
        } else if !self.checks.is_empty() {
            w.write_record(["check", "outcome", "detail"]).unwrap();
            for c in &self.checks {
                let outcome = c.outcome.to_string();
                if c.details.is_empty() {
                    w.write_record([c.check.as_str(), &outcome, ""]).unwrap();
                }
                for d in &c.details {
                    w.write_record([c.check.as_str(), &outcome, d]).unwrap();
                }
            }
        } else {
            w.write_record(["key", "value"]).unwrap();
            for (k, v) in &self.summary {
                w.write_record([k, v]).unwrap();
            }
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    fn text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.summary {
            out.push_str(&format!("{k}: {v}\n"));
        }
        if self.table.is_some() {
            out.push_str(&self.csv());
        }
        for c in &self.checks {
            out.push_str(&format!("{} {}\n", c.outcome, c.check));
            for d in &c.details {
                out.push_str(&format!("    {d}\n"));
            }
        }
        out
    }
}

/// Writes through a sibling temporary file and a rename, so readers never
/// see a partial report.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let mut f = std::fs::File::create(&tmp)?;
    f.write_all(contents.as_bytes())?;
    f.sync_all()?;
    std::fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("volume");
        r.set("spec", "a,b");
        r.set("closed_form", "1/4");
        let mut t = Table::new(&["m", "raw", "normalized"]);
        t.push(vec!["2".into(), "12".into(), "3".into()]);
        r.table = Some(t);
        r
    }

    #[test]
    fn csv_has_fixed_header() {
        assert_eq!(sample().render(Format::Csv), "m,raw,normalized\n2,12,3\n");
    }

    #[test]
    fn structured_keys_are_sorted() {
        let s = sample().render(Format::Structured);
        let c = s.find("\"closed_form\"").unwrap();
        assert!(c < s.find("\"spec\"").unwrap());
        assert!(s.find("\"checks\"").unwrap() < s.find("\"command\"").unwrap());
        assert_eq!(s, sample().render(Format::Structured));
    }

    #[test]
    fn checks_render_as_rows() {
        let mut r = Report::new("verify");
        let mut c = VerificationReport::new("x");
        c.note("one, two");
        r.checks.push(c);
        assert_eq!(r.render(Format::Csv), "check,outcome,detail\nx,PASS,\"one, two\"\n");
        assert_eq!(r.render(Format::Text), "PASS x\n    one, two\n");
        assert!(!r.failed());
    }
}
