//! Deterministic CSV and JSON summary emission.
//!
//! Columns: `suite,family,m,p,tau,alpha,n,lhs,rhs,ratio,status`. Rows are
//! sorted by key before writing and all numbers use fixed formats, so equal
//! configurations produce byte-identical files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Fail,
    Frozen,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Fail => "fail",
            Status::Frozen => "frozen",
        }
    }
}

/// One report row.
#[derive(Debug, Clone)]
pub struct Row {
    pub suite: String,
    pub family: String,
    pub m: usize,
    pub p: f64,
    pub tau: f64,
    /// Order vector rendered as `a1xa2x…`, or `-` when not applicable.
    pub alpha: String,
    pub n: i64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub status: Status,
}

impl Row {
    /// Group key for banding and summary statistics.
    pub fn group_key(&self) -> String {
        format!(
            "{}|{}|{}|{}",
            self.family,
            fmt_param(self.p),
            fmt_param(self.tau),
            self.alpha
        )
    }

    fn sort_key(&self) -> (String, u64, u64, String, i64) {
        (
            self.family.clone(),
            self.p.to_bits(),
            self.tau.to_bits(),
            self.alpha.clone(),
            self.n,
        )
    }
}

/// Render a parameter float compactly (`2`, `2.5`, `0.7`).
pub fn fmt_param(x: f64) -> String {
    format!("{}", x)
}

/// Render an order vector as `1x1` or `1.5x0.7`.
pub fn fmt_alpha(alpha: &[f64]) -> String {
    alpha
        .iter()
        .map(|&a| fmt_param(a))
        .collect::<Vec<_>>()
        .join("x")
}

fn fmt_value(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{:.12e}", x)
    }
}

/// Serialize rows to CSV (UTF-8, LF), sorted by key.
pub fn to_csv(rows: &[Row]) -> String {
    let mut sorted: Vec<&Row> = rows.iter().collect();
    sorted.sort_by_key(|r| r.sort_key());
    let mut out = String::from("suite,family,m,p,tau,alpha,n,lhs,rhs,ratio,status\n");
    for r in sorted {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.suite,
            r.family,
            r.m,
            fmt_param(r.p),
            fmt_param(r.tau),
            r.alpha,
            r.n,
            fmt_value(r.lhs),
            fmt_value(r.rhs),
            fmt_value(r.ratio),
            r.status.as_str()
        ));
    }
    out
}

pub fn write_csv(path: &Path, rows: &[Row]) -> Result<()> {
    crate::write_file(path, &to_csv(rows))
}

/// Per-group statistics in the JSON summary.
#[derive(Debug, Clone, Serialize)]
pub struct GroupSummary {
    pub count: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Least-squares slope of `ln ratio` against `ln n` over the schedule,
    /// when the group sweeps `n` with positive finite ratios.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub suite: String,
    pub mode: String,
    pub seed: u64,
    pub rows: usize,
    pub pass: bool,
    pub failures: Vec<String>,
    pub groups: BTreeMap<String, GroupSummary>,
}

/// Build per-group stats from finished rows.
pub fn summarize(
    suite: &str,
    mode: &str,
    seed: u64,
    rows: &[Row],
    pass: bool,
    failures: Vec<String>,
) -> Summary {
    let mut groups: BTreeMap<String, Vec<&Row>> = BTreeMap::new();
    for r in rows {
        groups.entry(r.group_key()).or_default().push(r);
    }
    let groups = groups
        .into_iter()
        .map(|(key, rs)| {
            let ratios: Vec<f64> = rs.iter().map(|r| r.ratio).collect();
            let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let pts: Vec<(f64, f64)> = rs
                .iter()
                .filter(|r| r.n >= 1 && r.ratio.is_finite() && r.ratio > 0.0)
                .map(|r| ((r.n as f64).ln(), r.ratio.ln()))
                .collect();
            let slope = if pts.len() >= 2 {
                Some(least_squares_slope(&pts))
            } else {
                None
            };
            (
                key,
                GroupSummary {
                    count: rs.len(),
                    min_ratio,
                    max_ratio,
                    slope,
                },
            )
        })
        .collect();
    Summary {
        suite: suite.to_string(),
        mode: mode.to_string(),
        seed,
        rows: rows.len(),
        pass,
        failures,
        groups,
    }
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        0.0
    } else {
        (n * sxy - sx * sy) / denom
    }
}

pub fn write_summary(path: &Path, summary: &Summary) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    crate::write_file(path, &text)
}
