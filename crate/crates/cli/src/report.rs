//! Experiment reports: one table of rows, a list of inequality checks with
//! both sides printed, free-form notes, and run telemetry.
//!
//! Rows and check sides are pre-rendered strings (floats at 17 significant
//! digits), so the CSV, JSON, and human renderings all show the same bytes
//! and the serialized forms are identical across worker counts. Telemetry
//! is the one run-dependent part; it prints in the human view only and is
//! skipped by serialization.

use std::time::Duration;

use primecurve::{fmt_f64, Result};
use serde::Serialize;

use crate::config::ExperimentConfig;

/// One verified inequality with both sides printed. `pass: None` means the
/// quantity is recorded without assertion (for instance when the profile
/// does not meet the hypothesis gating a lower bound).
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub lhs: String,
    pub relation: String,
    pub rhs: String,
    pub pass: Option<bool>,
    pub note: String,
}

impl Check {
    pub fn bound(name: impl Into<String>, lhs: f64, relation: &str, rhs: f64) -> Self {
        let pass = match relation {
            "<=" => lhs <= rhs,
            ">=" => lhs >= rhs,
            "<" => lhs < rhs,
            ">" => lhs > rhs,
            "==" => lhs == rhs,
            other => panic!("unknown relation {other}"),
        };
        Check {
            name: name.into(),
            lhs: fmt_f64(lhs),
            relation: relation.to_string(),
            rhs: fmt_f64(rhs),
            pass: Some(pass),
            note: String::new(),
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool, note: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            lhs: String::new(),
            relation: String::new(),
            rhs: String::new(),
            pass: Some(pass),
            note: note.into(),
        }
    }

    /// Record both sides without asserting.
    pub fn recorded(mut self, note: impl Into<String>) -> Self {
        self.pass = None;
        self.note = note.into();
        self
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Telemetry {
    pub wall: Duration,
    pub peak_rss_kb: u64,
}

/// Peak resident set size in kB from /proc/self/status, falling back to the
/// current RSS on kernels without VmHWM (0 if neither is available).
pub fn peak_rss_kb() -> u64 {
    let Ok(text) = std::fs::read_to_string("/proc/self/status") else {
        return 0;
    };
    for key in ["VmHWM:", "VmRSS:"] {
        if let Some(v) = text
            .lines()
            .find(|l| l.starts_with(key))
            .and_then(|l| l.split_whitespace().nth(1))
            .and_then(|v| v.parse().ok())
        {
            return v;
        }
    }
    0
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub telemetry: Telemetry,
}

impl ExperimentReport {
    pub fn new(config: &ExperimentConfig, columns: &[&str]) -> Self {
        ExperimentReport {
            config: config.clone(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            telemetry: Telemetry::default(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// True when no asserted check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass != Some(false))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("experiment: {}\n", self.config.kind.name()));
        // Column widths over header and cells.
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |cells: &[String], widths: &[usize]| -> String {
            cells
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        out.push_str(&line(&self.columns, &widths));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row, &widths));
            out.push('\n');
        }
        if !self.checks.is_empty() {
            out.push('\n');
            for c in &self.checks {
                let verdict = match c.pass {
                    Some(true) => "PASS",
                    Some(false) => "FAIL",
                    None => "info",
                };
                let body = if c.lhs.is_empty() {
                    String::new()
                } else {
                    format!(": {} {} {}", c.lhs, c.relation, c.rhs)
                };
                let note = if c.note.is_empty() {
                    String::new()
                } else {
                    format!("  [{}]", c.note)
                };
                out.push_str(&format!("{verdict}  {}{body}{note}\n", c.name));
            }
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out.push_str(&format!(
            "wall: {:.3}s  peak_rss: {} kB\n",
            self.telemetry.wall.as_secs_f64(),
            self.telemetry.peak_rss_kb
        ));
        out
    }

    /// Write CSV/JSON artifacts when the config names paths.
    pub fn write_outputs(&self) -> Result<()> {
        if let Some(path) = &self.config.out_csv {
            std::fs::write(path, self.to_csv())?;
        }
        if let Some(path) = &self.config.out_json {
            std::fs::write(path, self.to_json())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_relations() {
        assert_eq!(Check::bound("a", 1.0, "<=", 2.0).pass, Some(true));
        assert_eq!(Check::bound("a", 3.0, "<=", 2.0).pass, Some(false));
        assert_eq!(Check::bound("a", 1.0, ">=", 1.0).pass, Some(true));
        assert_eq!(Check::bound("a", 1.0, "<", 1.0).pass, Some(false));
        assert_eq!(
            Check::bound("a", 1.0, "<=", 2.0).recorded("gated").pass,
            None
        );
    }

    #[test]
    fn csv_shape() {
        let config = ExperimentConfig::default();
        let mut report = ExperimentReport::new(&config, &["x", "y"]);
        report.push_row(vec!["1".into(), fmt_f64(0.5)]);
        let csv = report.to_csv();
        assert_eq!(csv, "x,y\n1,5.0000000000000000e-1\n");
    }

    #[test]
    fn json_skips_telemetry() {
        let config = ExperimentConfig::default();
        let mut report = ExperimentReport::new(&config, &["x"]);
        report.telemetry.peak_rss_kb = 12345;
        assert!(!report.to_json().contains("12345"));
    }
}
