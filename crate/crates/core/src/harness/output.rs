//! CSV row dumps and JSON verdict summaries.

use std::path::Path;

use serde::Serialize;

use super::registry::CheckOutcome;
use super::report::{InequalityReport, Verdict};
use crate::error::Result;

#[derive(Serialize)]
struct CsvRow<'a> {
    check: &'a str,
    report: &'a str,
    f: &'a str,
    operator: &'a str,
    scale: f64,
    p: f64,
    r: usize,
    s: usize,
    lhs: f64,
    rhs: f64,
    ratio: Option<f64>,
    degenerate: bool,
}

/// One CSV row per grid point of every report, with a header row.
pub fn write_rows_csv(path: &Path, outcomes: &[CheckOutcome]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for o in outcomes {
        for rep in &o.reports {
            for row in &rep.rows {
                w.serialize(CsvRow {
                    check: &o.id,
                    report: &rep.name,
                    f: &row.f,
                    operator: &row.operator,
                    scale: row.scale,
                    p: row.p,
                    r: row.r,
                    s: row.s,
                    lhs: row.lhs,
                    rhs: row.rhs,
                    ratio: row.ratio,
                    degenerate: row.degenerate,
                })?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportSummary {
    pub name: String,
    pub verdict: Verdict,
    pub max_ratio: Option<f64>,
    pub rows: usize,
    pub degenerate_rows: usize,
    pub conditional: bool,
    pub notes: Vec<String>,
}

impl From<&InequalityReport> for ReportSummary {
    fn from(r: &InequalityReport) -> Self {
        Self {
            name: r.name.clone(),
            verdict: r.verdict,
            max_ratio: r.max_ratio.is_finite().then_some(r.max_ratio),
            rows: r.rows.len(),
            degenerate_rows: r.degenerate_rows(),
            conditional: r.conditional,
            notes: r.notes.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckSummary {
    pub id: String,
    pub verdict: Verdict,
    pub seconds: f64,
    pub reports: Vec<ReportSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub verdict: Verdict,
    pub holds: usize,
    pub violated: usize,
    pub degenerate: usize,
    pub checks: Vec<CheckSummary>,
}

impl Summary {
    pub fn new(outcomes: &[CheckOutcome]) -> Self {
        let count = |v| outcomes.iter().filter(|o| o.verdict() == v).count();
        let violated = count(Verdict::Violated);
        Self {
            verdict: if violated > 0 { Verdict::Violated } else { Verdict::HoldsWithConstant },
            holds: count(Verdict::HoldsWithConstant),
            violated,
            degenerate: count(Verdict::Degenerate),
            checks: outcomes
                .iter()
                .map(|o| CheckSummary {
                    id: o.id.clone(),
                    verdict: o.verdict(),
                    seconds: o.seconds,
                    reports: o.reports.iter().map(ReportSummary::from).collect(),
                })
                .collect(),
        }
    }
}

pub fn write_summary_json(path: &Path, summary: &Summary) -> Result<()> {
    let text = serde_json::to_string_pretty(summary)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
