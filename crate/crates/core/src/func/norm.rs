//! L^p norms and the Ω_p majorant test.

use serde::Serialize;

use super::quadrature::{max_abs, quadrature_nodes, weighted_sum};
use super::{Domain, PointwiseFunction, QuadratureConfig};
use crate::error::{domain, Result};

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return domain(format!("p must be ≥ 1, got {p}"));
    }
    Ok(())
}

/// `(∫_lo^hi |g|^p)^{1/p}` for an arbitrary map; `p = ∞` gives the max over nodes.
pub fn lp_norm_of<F>(g: F, lo: f64, hi: f64, breaks: &[f64], p: f64, q: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    check_p(p)?;
    if hi <= lo {
        return Ok(0.0);
    }
    let nodes = quadrature_nodes(lo, hi, breaks, q);
    if p.is_infinite() {
        return Ok(max_abs(&nodes, g));
    }
    let s = if p == 1.0 {
        weighted_sum(&nodes, |x| g(x).abs())
    } else if p == 2.0 {
        weighted_sum(&nodes, |x| {
            let v = g(x);
            v * v
        })
    } else {
        weighted_sum(&nodes, |x| g(x).abs().powf(p))
    };
    Ok(s.max(0.0).powf(1.0 / p))
}

/// `‖f‖_p` over `sub` (or all of `dom`), reading the a.e. representative.
pub fn lp_norm(
    f: &PointwiseFunction,
    dom: &Domain,
    p: f64,
    sub: Option<(f64, f64)>,
    q: &QuadratureConfig,
) -> Result<f64> {
    check_p(p)?;
    let (lo, hi) = match sub {
        None => dom.bounds(),
        Some((lo, hi)) => {
            if !(lo <= hi) || !dom.contains(lo) || !dom.contains(hi) {
                return domain(format!("sub-interval [{lo}, {hi}] not contained in {dom}"));
            }
            (lo, hi)
        }
    };
    let (lo, hi) = match f.support() {
        Some((s0, s1)) => (lo.max(s0), hi.min(s1)),
        None => (lo, hi),
    };
    lp_norm_of(|x| f.ae_value(x), lo, hi, f.breakpoints(), p, q)
}

/// Outcome of [`omega_p_majorant_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MajorantVerdict {
    pub holds: bool,
    pub reason: String,
}

impl MajorantVerdict {
    fn fail(reason: impl Into<String>) -> Self {
        Self { holds: false, reason: reason.into() }
    }
}

const MAJORANT_TOL: f64 = 1e-12;
const MAJORANT_GRID: usize = 20_001;

/// Sufficient test for membership in Ω_p: an even, radially non-increasing
/// `g ∈ L^p` with `|f| ≤ g` on a dense grid of the window.
pub fn omega_p_majorant_check(
    f: &PointwiseFunction,
    g: &PointwiseFunction,
    dom: &Domain,
    p: f64,
) -> MajorantVerdict {
    let Domain::Line { lo, hi } = *dom else {
        return MajorantVerdict::fail("majorant test needs a line domain");
    };
    if p.is_nan() || p < 1.0 {
        return MajorantVerdict::fail(format!("p must be ≥ 1, got {p}"));
    }
    let half = lo.abs().max(hi.abs());
    let step = 2.0 * half / (MAJORANT_GRID - 1) as f64;

    let mut prev = f64::INFINITY;
    for i in 0..=(MAJORANT_GRID / 2) {
        let x = i as f64 * step;
        let (gp, gm) = (g.eval(x), g.eval(-x));
        if !gp.is_finite() {
            return MajorantVerdict::fail(format!("g is not finite at {x}"));
        }
        if (gp - gm).abs() > MAJORANT_TOL * (1.0 + gp.abs()) {
            return MajorantVerdict::fail(format!("g is not even at x = {x}"));
        }
        if gp > prev + MAJORANT_TOL * (1.0 + prev.abs()) {
            return MajorantVerdict::fail(format!("g increases at x = {x}"));
        }
        prev = gp;
        for y in [x, -x] {
            let fy = f.eval(y).abs();
            let gy = g.eval(y);
            if !(fy <= gy + MAJORANT_TOL * (1.0 + gy.abs())) {
                return MajorantVerdict::fail(format!("|f({y})| = {fy} exceeds g = {gy}"));
            }
        }
    }

    let q = QuadratureConfig::default().with_cells(8192);
    let norm = match lp_norm(g, &Domain::Line { lo: -half, hi: half }, p, None, &q) {
        Ok(v) if v.is_finite() => v,
        _ => return MajorantVerdict::fail("‖g‖_p is not finite on the window"),
    };
    // The tail beyond the window must shrink faster than x^{-1/p}.
    let tail = |x: f64| x * g.eval(x).abs().powf(p);
    if half > 0.0 && norm > 0.0 {
        let (t_half, t_full) = (tail(half / 2.0), tail(half));
        if t_full > 1e-3 * norm.powf(p) || (t_full > 0.0 && t_full >= t_half) {
            return MajorantVerdict::fail(format!(
                "g does not decay fast enough to be p-integrable beyond {half}"
            ));
        }
    }
    MajorantVerdict {
        holds: true,
        reason: format!("‖g‖_p ≈ {norm:.6e}"),
    }
}
