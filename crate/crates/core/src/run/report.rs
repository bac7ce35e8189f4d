//! Run reports and their JSON/CSV serialisation.
//!
//! The JSON document is the source of truth. CSV files flatten `items` into
//! one row per item with the fixed column schema of [`csv_columns`]:
//!
//! | command                 | columns after `label`                                   |
//! |-------------------------|---------------------------------------------------------|
//! | `verify-lemma`          | `m, lhs, rhs, margin, relative_margin`                  |
//! | `search-counterexample` | `m, p1, log_ratio, lhs, rhs, margin, relative_violation` |
//! | `critical-l`            | `m, lower, upper, width`                                |
//! | `verify-theorem1`       | `size, prob_a, lhs_upper, lhs_lower, rhs, max_gap`      |
//! | `simulate-empirical`    | `u, deviation, empirical_upper, empirical_lower, bound, upper_limit_upper, upper_limit_lower` |
//! | `phi-scan`              | `L, phi_max, p_star, t_star`                            |
//!
//! Every table ends with a `pass` column (`true`/`false`). Missing values
//! are written as empty cells.
//!
//! Text fields in `notes` use these plain formats: subsets are point
//! indices joined by commas (`0,3`), measures are `index:weight` pairs
//! (`0:0.5,3:0.5`), and atom vectors are comma-separated numbers.

use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::config::{Command, RunConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportItem {
    pub label: String,
    pub values: IndexMap<String, f64>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub notes: IndexMap<String, String>,
    pub pass: bool,
}

impl ReportItem {
    pub fn new(label: impl Into<String>, pass: bool) -> Self {
        Self {
            label: label.into(),
            pass,
            ..Self::default()
        }
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }

    pub fn note(mut self, key: &str, v: impl Into<String>) -> Self {
        self.notes.insert(key.to_string(), v.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Fully resolved configuration; feeding it back reproduces the run.
    pub config: RunConfig,
    pub version: String,
    pub duration_secs: f64,
    /// Aggregates over the whole run (counts, extremes).
    pub summary: IndexMap<String, f64>,
    pub items: Vec<ReportItem>,
    pub pass: bool,
}

impl RunReport {
    /// 0 on aggregate pass, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    /// The report without its timing, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            duration_secs: 0.0,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))
    }
}

/// CSV columns between `label` and `pass`.
pub fn csv_columns(command: Command) -> &'static [&'static str] {
    match command {
        Command::VerifyLemma => &["m", "lhs", "rhs", "margin", "relative_margin"],
        Command::SearchCounterexample => &[
            "m",
            "p1",
            "log_ratio",
            "lhs",
            "rhs",
            "margin",
            "relative_violation",
        ],
        Command::CriticalL => &["m", "lower", "upper", "width"],
        Command::VerifyTheorem1 => &["size", "prob_a", "lhs_upper", "lhs_lower", "rhs", "max_gap"],
        Command::SimulateEmpirical => &[
            "u",
            "deviation",
            "empirical_upper",
            "empirical_lower",
            "bound",
            "upper_limit_upper",
            "upper_limit_lower",
        ],
        Command::PhiScan => &["L", "phi_max", "p_star", "t_star"],
    }
}

pub fn write_csv<W: std::io::Write>(report: &RunReport, out: W) -> Result<()> {
    let columns = csv_columns(report.config.command);
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    let mut header = vec!["label"];
    header.extend_from_slice(columns);
    header.push("pass");
    w.write_record(&header).map_err(csv_err)?;
    for item in &report.items {
        let mut row = vec![item.label.clone()];
        row.extend(
            columns
                .iter()
                .map(|c| item.values.get(*c).map(|v| v.to_string()).unwrap_or_default()),
        );
        row.push(item.pass.to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(report: &RunReport, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_csv(report, file)
}

pub fn emit_json(report: &RunReport, path: &Path) -> Result<()> {
    fs::write(path, report.to_json()?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty(command: Command) -> RunReport {
        RunReport {
            config: RunConfig::new(command),
            version: "0".into(),
            duration_secs: 0.0,
            summary: IndexMap::new(),
            items: vec![],
            pass: true,
        }
    }

    fn csv_text(report: &RunReport) -> String {
        let mut buf = Vec::new();
        write_csv(report, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_report_gives_header_only() {
        let text = csv_text(&empty(Command::PhiScan));
        assert_eq!(text, "label,L,phi_max,p_star,t_star,pass\n");
    }

    #[test]
    fn tail_rows_project_fields() {
        let mut report = empty(Command::SimulateEmpirical);
        report.items.push(
            ReportItem::new("u=1", true)
                .value("u", 1.0)
                .value("empirical_upper", 0.01)
                .value("empirical_lower", 0.02)
                .value("bound", 0.5),
        );
        let text = csv_text(&report);
        let row = text.lines().nth(1).unwrap();
        assert_eq!(row, "u=1,1,,0.01,0.02,0.5,,,true");
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let report = empty(Command::CriticalL);
        let err = emit_csv(&report, Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }

    #[test]
    fn json_round_trip() {
        let mut report = empty(Command::CriticalL);
        report.items.push(ReportItem::new("m=2", true).value("lower", 1.07).note("k", "v"));
        let back = RunReport::from_json(&report.to_json().unwrap()).unwrap();
        assert_eq!(back, report);
    }
}
