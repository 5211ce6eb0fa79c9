//! Report files: per-report CSV, the JSON summary and timings.

use serde::Serialize;
use smartpath::verify::{CheckReport, CheckStatus};
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const CSV_HEADER: &str = "grid,lhs,rhs,abs_dev,rel_dev";

/// Columns of a report CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportCsv {
    pub grid: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub abs_dev: Vec<f64>,
    pub rel_dev: Vec<f64>,
}

/// 17 significant digits, so every value round-trips exactly.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn report_csv(r: &CheckReport) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for (i, (a, b)) in r.deviations().into_iter().enumerate() {
        let row = [r.grid[i], r.lhs[i], r.rhs[i], a, b].map(format_value);
        let _ = writeln!(s, "{}", row.join(","));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("CSV line {line}: {msg}")]
pub struct CsvError {
    pub line: usize,
    pub msg: String,
}

/// Parses a report CSV written by [`report_csv`].
pub fn parse_report_csv(text: &str) -> Result<ReportCsv, CsvError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        Some(h) => {
            return Err(CsvError {
                line: 1,
                msg: format!("expected header `{CSV_HEADER}`, got `{h}`"),
            })
        }
        None => {
            return Err(CsvError {
                line: 1,
                msg: "missing header".into(),
            })
        }
    }
    let mut out = ReportCsv::default();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(CsvError {
                line: n,
                msg: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        let mut v = [0.0; 5];
        for (slot, f) in v.iter_mut().zip(&fields) {
            *slot = f.parse().map_err(|_| CsvError {
                line: n,
                msg: format!("`{f}` is not a number"),
            })?;
        }
        out.grid.push(v[0]);
        out.lhs.push(v[1]);
        out.rhs.push(v[2]);
        out.abs_dev.push(v[3]);
        out.rel_dev.push(v[4]);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary<'a> {
    pub target: [f64; 2],
    pub source: String,
    pub seed: u64,
    pub tau_grid: &'a [f64],
    pub counts: Counts,
    pub reports: &'a [CheckReport],
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub errors: usize,
}

impl Counts {
    pub fn of(reports: &[CheckReport]) -> Self {
        let mut c = Self::default();
        for r in reports {
            match r.status {
                CheckStatus::Passed => c.passed += 1,
                CheckStatus::Failed => c.failed += 1,
                CheckStatus::Skipped => c.skipped += 1,
                CheckStatus::Error => c.errors += 1,
            }
        }
        c
    }
}

pub fn summary_json(summary: &Summary<'_>) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
    s.push('\n');
    s
}

/// `{report name: runtime in ms}`.
pub fn timings_json(reports: &[CheckReport]) -> String {
    let map: BTreeMap<&str, u64> = reports
        .iter()
        .map(|r| (r.check_name.as_str(), r.runtime_ms))
        .collect();
    let mut s = serde_json::to_string_pretty(&map).expect("timings serialize");
    s.push('\n');
    s
}
