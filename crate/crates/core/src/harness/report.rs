//! Inequality reports and their verdicts.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::constants::Constants;

/// Both sides at or below this are treated as zero.
pub const ZERO_LEVEL: f64 = 1e-10;
/// Relative slack granted to frozen constants.
pub const FROZEN_SLACK: f64 = 0.05;
/// Absolute slack for literal inequalities.
pub const LITERAL_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HoldsWithConstant,
    Violated,
    Degenerate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::HoldsWithConstant => "holds_with_constant",
            Verdict::Violated => "violated",
            Verdict::Degenerate => "degenerate",
        })
    }
}

/// How the ratios of a report are judged.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Bound {
    /// `lhs ≤ rhs + slack` on every row.
    Literal { slack: f64 },
    /// `max ratio ≤ (1 + 5%) · value`; `value = None` means not yet calibrated.
    Frozen { key: String, value: Option<f64> },
    /// `lo/(1 + 5%) ≤ ratio ≤ (1 + 5%) · hi` on every row.
    Band { key: String, lo: Option<f64>, hi: Option<f64> },
    /// Ratios are tabulated without a pass/fail threshold.
    ReportOnly,
}

impl Bound {
    pub fn literal() -> Self {
        Bound::Literal { slack: LITERAL_SLACK }
    }

    pub fn frozen(key: &str, constants: &Constants) -> Self {
        Bound::Frozen { key: key.to_string(), value: constants.get(key) }
    }

    pub fn band(key: &str, constants: &Constants) -> Self {
        Bound::Band {
            key: key.to_string(),
            lo: constants.get(&format!("{key}.lo")),
            hi: constants.get(&format!("{key}.hi")),
        }
    }
}

/// One grid point of a check, with the tuple that produced it.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub f: String,
    pub operator: String,
    pub scale: f64,
    pub p: f64,
    pub r: usize,
    pub s: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: Option<f64>,
    pub degenerate: bool,
    pub aux: BTreeMap<String, f64>,
}

impl Row {
    pub fn new(f: &str, operator: &str, scale: f64, p: f64, r: usize, s: usize, lhs: f64, rhs: f64) -> Self {
        let degenerate = lhs.abs() <= ZERO_LEVEL && rhs.abs() <= ZERO_LEVEL;
        let ratio = if degenerate {
            None
        } else if rhs.abs() <= ZERO_LEVEL {
            Some(f64::INFINITY)
        } else {
            Some(lhs / rhs)
        };
        Self {
            f: f.to_string(),
            operator: operator.to_string(),
            scale,
            p,
            r,
            s,
            lhs,
            rhs,
            ratio,
            degenerate,
            aux: BTreeMap::new(),
        }
    }

    pub fn with_aux(mut self, key: &str, value: f64) -> Self {
        self.aux.insert(key.to_string(), value);
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub description: String,
    pub rows: Vec<Row>,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub bound: Bound,
    pub verdict: Verdict,
    /// The inequality only follows from an unproven hypothesis on the operator.
    pub conditional: bool,
    pub notes: Vec<String>,
}

impl InequalityReport {
    pub fn new(name: &str, description: &str, rows: Vec<Row>, bound: Bound) -> Self {
        let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
        let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let mut report = Self {
            name: name.to_string(),
            description: description.to_string(),
            rows,
            max_ratio,
            min_ratio,
            bound,
            verdict: Verdict::Degenerate,
            conditional: false,
            notes: Vec::new(),
        };
        report.verdict = report.judge();
        report
    }

    pub fn conditional(mut self) -> Self {
        self.conditional = true;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    fn judge(&self) -> Verdict {
        if self.rows.iter().all(|r| r.degenerate) {
            return Verdict::Degenerate;
        }
        let live = || self.rows.iter().filter(|r| !r.degenerate);
        let ok = match &self.bound {
            Bound::Literal { slack } => live().all(|r| r.lhs <= r.rhs + slack),
            Bound::Frozen { value, .. } => {
                self.max_ratio.is_finite() && value.is_none_or(|c| self.max_ratio <= c * (1.0 + FROZEN_SLACK))
            }
            Bound::Band { lo, hi, .. } => {
                self.max_ratio.is_finite()
                    && self.min_ratio > 0.0
                    && lo.is_none_or(|c| self.min_ratio >= c / (1.0 + FROZEN_SLACK))
                    && hi.is_none_or(|c| self.max_ratio <= c * (1.0 + FROZEN_SLACK))
            }
            Bound::ReportOnly => true,
        };
        if ok { Verdict::HoldsWithConstant } else { Verdict::Violated }
    }

    /// Values to store in the regression file for this report.
    pub fn calibration(&self) -> Vec<(String, f64)> {
        match &self.bound {
            Bound::Frozen { key, .. } if self.max_ratio.is_finite() => vec![(key.clone(), self.max_ratio)],
            Bound::Band { key, .. } if self.max_ratio.is_finite() => vec![
                (format!("{key}.lo"), self.min_ratio),
                (format!("{key}.hi"), self.max_ratio),
            ],
            _ => Vec::new(),
        }
    }

    pub fn degenerate_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.degenerate).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(lhs: f64, rhs: f64) -> Row {
        Row::new("f", "op", 1.0, 2.0, 1, 1, lhs, rhs)
    }

    #[test]
    fn verdicts() {
        let r = InequalityReport::new("a", "", vec![row(0.0, 0.0), row(1e-12, 0.0)], Bound::literal());
        assert_eq!(r.verdict, Verdict::Degenerate);

        let r = InequalityReport::new("b", "", vec![row(1.0, 2.0), row(0.0, 0.0)], Bound::literal());
        assert_eq!(r.verdict, Verdict::HoldsWithConstant);
        assert_eq!(r.max_ratio, 0.5);

        let frozen = |v| Bound::Frozen { key: "k".into(), value: Some(v) };
        let r = InequalityReport::new("c", "", vec![row(1.04, 1.0)], frozen(1.0));
        assert_eq!(r.verdict, Verdict::HoldsWithConstant);
        let r = InequalityReport::new("c", "", vec![row(1.06, 1.0)], frozen(1.0));
        assert_eq!(r.verdict, Verdict::Violated);

        // Zero right-hand side with a nonzero left-hand side falsifies.
        let r = InequalityReport::new("d", "", vec![row(1.0, 0.0)], frozen(10.0));
        assert_eq!(r.verdict, Verdict::Violated);
    }

    #[test]
    fn band_calibration() {
        let band = Bound::Band { key: "k".into(), lo: None, hi: None };
        let r = InequalityReport::new("e", "", vec![row(1.0, 2.0), row(3.0, 1.0)], band);
        assert_eq!(r.calibration(), vec![("k.lo".to_string(), 0.5), ("k.hi".to_string(), 3.0)]);
    }
}
