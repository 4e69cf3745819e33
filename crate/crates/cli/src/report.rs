use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

/// Output of one subcommand: a summary, an optional table and a verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    /// `None` for commands that only compute
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
    pub summary: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub columns: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<Vec<String>>,
    #[serde(skip)]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            passed: None,
            summary: BTreeMap::new(),
            columns: Vec::new(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_columns(mut self, columns: &[&str]) -> Self {
        self.columns = columns.iter().map(|c| c.to_string()).collect();
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Combines with an existing verdict; any failure is sticky.
    pub fn verdict(&mut self, ok: bool) {
        self.passed = Some(self.passed.unwrap_or(true) && ok);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.command);
        for (k, v) in &self.summary {
            let shown = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(out, "  {k}: {shown}");
        }
        if !self.columns.is_empty() {
            let mut widths: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
            for row in &self.rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let line = |cells: &[String]| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, &w)| format!("{c:<w$}"))
                    .collect();
                padded.join("  ").trim_end().to_string()
            };
            let _ = writeln!(out);
            let _ = writeln!(out, "{}", line(&self.columns));
            let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
            let _ = writeln!(out, "{}", rule.join("  "));
            for row in &self.rows {
                let _ = writeln!(out, "{}", line(row));
            }
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        if let Some(p) = self.passed {
            let _ = writeln!(out, "{}", if p { "PASS" } else { "FAIL" });
        }
        out
    }

    fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.columns.is_empty() {
            w.write_record(["key", "value"]).expect("in-memory write");
            for (k, v) in &self.summary {
                let shown = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                w.write_record([k.as_str(), shown.as_str()]).expect("in-memory write");
            }
            if let Some(p) = self.passed {
                w.write_record(["passed", if p { "true" } else { "false" }])
                    .expect("in-memory write");
            }
        } else {
            w.write_record(&self.columns).expect("in-memory write");
            for row in &self.rows {
                w.write_record(row).expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo").with_columns(&["n", "value"]);
        r.set("p", 5);
        r.row(vec!["1".into(), "q, 1".into()]);
        r.verdict(true);
        r
    }

    #[test]
    fn csv_quotes_cells() {
        assert_eq!(sample().render(Format::Csv), "n,value\n1,\"q, 1\"\n");
    }

    #[test]
    fn text_has_verdict() {
        let t = sample().render(Format::Text);
        assert!(t.starts_with("demo\n  p: 5\n"));
        assert!(t.ends_with("PASS\n"));
    }

    #[test]
    fn verdicts_are_sticky() {
        let mut r = sample();
        r.verdict(false);
        r.verdict(true);
        assert_eq!(r.passed, Some(false));
    }
}
