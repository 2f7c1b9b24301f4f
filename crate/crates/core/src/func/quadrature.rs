//! Composite quadrature on a jittered partition.
//!
//! The interval is cut at every declared breakpoint. Each piece is covered by
//! cells of equal width whose interior nodes are offset by an irrational
//! fraction of a cell, so that no node lands on a rational point. When a
//! breakpoint touches the range, every piece is integrated in a graded
//! variable that clusters nodes at both piece ends.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fractional part of 1/√2.
pub const DEFAULT_JITTER: f64 = std::f64::consts::FRAC_1_SQRT_2;

const MIN_CELLS: usize = 16;
const MIN_PIECE_CELLS: usize = 32;
const CHUNK: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Midpoint,
    Gauss3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub cells: usize,
    pub jitter: f64,
    pub rule: Rule,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            cells: 2048,
            jitter: DEFAULT_JITTER,
            rule: Rule::Gauss3,
        }
    }
}

impl QuadratureConfig {
    pub fn with_cells(mut self, cells: usize) -> Self {
        self.cells = cells;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells < MIN_CELLS {
            return Err(Error::Config(format!(
                "quadrature needs at least {MIN_CELLS} cells, got {}",
                self.cells
            )));
        }
        if !(self.jitter > 0.0 && self.jitter < 1.0) {
            return Err(Error::Config(format!(
                "jitter must lie in (0, 1), got {}",
                self.jitter
            )));
        }
        Ok(())
    }
}

fn rule_nodes(rule: Rule) -> &'static [(f64, f64)] {
    const MID: [(f64, f64); 1] = [(0.5, 1.0)];
    // sqrt(3/5)/2
    const G: f64 = 0.387_298_334_620_741_7;
    const GAUSS3: [(f64, f64); 3] = [
        (0.5 - G, 5.0 / 18.0),
        (0.5, 8.0 / 18.0),
        (0.5 + G, 5.0 / 18.0),
    ];
    match rule {
        Rule::Midpoint => &MID,
        Rule::Gauss3 => &GAUSS3,
    }
}

fn grade(t: f64) -> f64 {
    let t2 = t * t;
    t2 * t2 * (35.0 - 84.0 * t + 70.0 * t2 - 20.0 * t2 * t)
}

fn grade_prime(t: f64) -> f64 {
    let s = t * (1.0 - t);
    140.0 * s * s * s
}

/// Cut points of `[0, 1]`: `0`, `(jitter + i)/m` for `i = 0..m-1`, `1`.
fn unit_partition(m: usize, jitter: f64) -> impl Iterator<Item = (f64, f64)> {
    let h = 1.0 / m as f64;
    let cuts = std::iter::once(0.0)
        .chain((0..m).map(move |i| (jitter + i as f64) * h))
        .chain(std::iter::once(1.0));
    let next = cuts.clone().skip(1);
    cuts.zip(next).filter(|(a, b)| b > a)
}

fn push_piece(out: &mut Vec<(f64, f64)>, c: f64, d: f64, m: usize, graded: bool, q: &QuadratureConfig) {
    let len = d - c;
    let rule = rule_nodes(q.rule);
    for (t0, t1) in unit_partition(m, q.jitter) {
        let w = t1 - t0;
        for &(s, ws) in rule {
            let t = t0 + s * w;
            if graded {
                let x = if t <= 0.5 {
                    c + len * grade(t)
                } else {
                    d - len * grade(1.0 - t)
                };
                out.push((x, ws * w * len * grade_prime(t)));
            } else {
                out.push((c + t * len, ws * w * len));
            }
        }
    }
}

/// Nodes and weights of the composite rule on `[lo, hi]`.
pub fn quadrature_nodes(lo: f64, hi: f64, breaks: &[f64], q: &QuadratureConfig) -> Vec<(f64, f64)> {
    if !(hi > lo) {
        return Vec::new();
    }
    let eps = 1e-14 * (hi - lo).max(lo.abs()).max(hi.abs());
    let graded = breaks.iter().any(|&b| b >= lo - eps && b <= hi + eps);
    let mut cuts = vec![lo];
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&b| b > lo + eps && b < hi - eps)
        .collect();
    inner.sort_by(f64::total_cmp);
    for b in inner {
        if b - cuts[cuts.len() - 1] > eps {
            cuts.push(b);
        }
    }
    cuts.push(hi);

    let total = hi - lo;
    let cells = q.cells.max(MIN_CELLS);
    let mut out = Vec::with_capacity(3 * (cells + MIN_PIECE_CELLS * cuts.len()));
    for pair in cuts.windows(2) {
        let (c, d) = (pair[0], pair[1]);
        let share = ((cells as f64) * (d - c) / total).round() as usize;
        push_piece(&mut out, c, d, share.max(MIN_PIECE_CELLS), graded, q);
    }
    out
}

/// Sum of `w f(x)` over the nodes. Summation is chunked in a fixed order, so
/// the result does not depend on the number of worker threads.
pub(crate) fn weighted_sum<F>(nodes: &[(f64, f64)], f: F) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    let chunk_sum = |c: &[(f64, f64)]| c.iter().map(|&(x, w)| w * f(x)).sum::<f64>();
    let partial: Vec<f64> = if nodes.len() > 4 * CHUNK {
        nodes.par_chunks(CHUNK).map(chunk_sum).collect()
    } else {
        nodes.chunks(CHUNK).map(chunk_sum).collect()
    };
    partial.iter().sum()
}

/// Largest `|f|` over the nodes.
pub(crate) fn max_abs<F>(nodes: &[(f64, f64)], f: F) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    let chunk_max = |c: &[(f64, f64)]| c.iter().fold(0.0_f64, |m, &(x, _)| m.max(f(x).abs()));
    if nodes.len() > 4 * CHUNK {
        nodes.par_chunks(CHUNK).map(chunk_max).reduce(|| 0.0, f64::max)
    } else {
        nodes.chunks(CHUNK).map(chunk_max).fold(0.0, f64::max)
    }
}

/// `∫_lo^hi f`, with the integrand singular or discontinuous at most at `breaks`.
pub fn integrate<F>(f: F, lo: f64, hi: f64, breaks: &[f64], q: &QuadratureConfig) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    if hi <= lo {
        return 0.0;
    }
    weighted_sum(&quadrature_nodes(lo, hi, breaks, q), f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_length() {
        let q = QuadratureConfig::default();
        for breaks in [vec![], vec![0.3], vec![-1.0, 0.0, 2.0]] {
            let s: f64 = quadrature_nodes(-1.0, 2.0, &breaks, &q).iter().map(|n| n.1).sum();
            assert!((s - 3.0).abs() < 1e-12, "{breaks:?}: {s}");
        }
    }

    #[test]
    fn polynomials_are_exact() {
        let q = QuadratureConfig::default().with_cells(16);
        let v = integrate(|x| x.powi(5), 0.0, 1.0, &[], &q);
        assert!((v - 1.0 / 6.0).abs() < 1e-14);
        // Graded pieces give up exactness in exchange for resolving singularities.
        let v = integrate(|x| x * x, -1.0, 1.0, &[0.0], &q);
        assert!((v - 2.0 / 3.0).abs() < 1e-10, "{:e}", v - 2.0 / 3.0);
    }

    #[test]
    fn integrable_singularity() {
        let q = QuadratureConfig::default();
        let v = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, &[0.0], &q);
        assert!((v - 2.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn jump_at_breakpoint() {
        let q = QuadratureConfig::default().with_cells(64);
        let v = integrate(|x| if x < 0.3 { 1.0 } else { 0.0 }, 0.0, 1.0, &[0.3], &q);
        assert!((v - 0.3).abs() < 1e-10, "{:e}", v - 0.3);
    }

    #[test]
    fn nodes_avoid_rationals() {
        let q = QuadratureConfig::default();
        for (x, _) in quadrature_nodes(0.0, 1.0, &[], &q) {
            assert!(super::super::rational_approximation(x, 1000, 1e-12).is_none(), "{x}");
        }
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let q = QuadratureConfig::default().with_cells(20_000);
        let f = |x: f64| (x * 3.7).sin() * x.exp();
        let a = integrate(f, 0.0, 2.0, &[], &q);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| integrate(f, 0.0, 2.0, &[], &q));
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().with_cells(8).validate().is_err());
        let mut q = QuadratureConfig::default();
        q.jitter = 1.0;
        assert!(q.validate().is_err());
    }
}
