//! Finite differences, the moduli ω_r and ω_k(f, x; δ), the τ-modulus, and
//! ratio tables between consecutive moduli.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::func::{
    binomial, lp_norm, lp_norm_of, quadrature_nodes, Domain, PointwiseFunction, QuadratureConfig, Regularity,
};
use crate::harness::{fit_decay, RateReport};

/// Coefficients `C(r,k)(-1)^{r-k}` of the r-th forward difference.
pub fn difference_coefficients(r: usize) -> Vec<f64> {
    (0..=r)
        .map(|k| {
            let sign = if (r - k) % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(r, k)
        })
        .collect()
}

#[inline]
fn apply_difference<F: Fn(f64) -> f64>(g: F, coeffs: &[f64], x: f64, h: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * g(x + k as f64 * h))
        .sum()
}

/// `Δ_h^r f(x)` from exact pointwise values.
pub fn finite_difference(f: &PointwiseFunction, dom: &Domain, x: f64, h: f64, r: usize) -> Result<f64> {
    if r == 0 {
        return domain("difference order must be ≥ 1");
    }
    if !(h > 0.0) {
        return domain(format!("step must be positive, got {h}"));
    }
    let end = x + r as f64 * h;
    if !dom.contains(x) || !dom.contains(end) {
        return domain(format!("[{x}, {end}] is not inside {dom}"));
    }
    Ok(apply_difference(|t| f.eval(t), &difference_coefficients(r), x, h))
}

/// Parameters shared by the modulus routines.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusRequest {
    pub order: usize,
    pub delta: f64,
    pub p: f64,
    pub h_grid_size: usize,
    pub t_grid_size: usize,
}

impl ModulusRequest {
    pub fn new(order: usize, delta: f64, p: f64) -> Self {
        Self {
            order,
            delta,
            p,
            h_grid_size: 64,
            t_grid_size: 129,
        }
    }

    pub fn with_grids(mut self, h_grid_size: usize, t_grid_size: usize) -> Self {
        self.h_grid_size = h_grid_size;
        self.t_grid_size = t_grid_size;
        self
    }

    pub fn validate(&self, dom: &Domain) -> Result<()> {
        if self.p.is_nan() || self.p < 1.0 {
            return domain(format!("p must be ≥ 1, got {}", self.p));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return domain(format!("delta must be finite and ≥ 0, got {}", self.delta));
        }
        if self.h_grid_size == 0 || self.t_grid_size < 2 {
            return Err(Error::Config("h grid needs ≥ 1 point and t grid ≥ 2 points".into()));
        }
        if let Domain::Interval { a, b } = *dom {
            let k = self.order.max(1) as f64;
            if k * self.delta > (b - a) * (1.0 + 1e-12) {
                return domain(format!(
                    "delta = {} exceeds (b-a)/{} = {}",
                    self.delta,
                    self.order.max(1),
                    (b - a) / k
                ));
            }
        }
        Ok(())
    }
}

/// Range of x for which `Δ_h^r f(x)` is defined and possibly nonzero.
fn difference_range(f: &PointwiseFunction, dom: &Domain, span: f64) -> Option<(f64, f64)> {
    let (lo, hi) = dom.bounds();
    let (mut lo, mut hi) = (lo, hi - span);
    if let (Domain::Line { .. }, Some((s0, s1))) = (dom, f.support()) {
        lo = s0 - span;
        hi = s1;
    } else if let Some((s0, s1)) = f.support() {
        lo = lo.max(s0 - span);
        hi = hi.min(s1);
    }
    (lo < hi).then_some((lo, hi))
}

fn shifted_breaks(f: &PointwiseFunction, r: usize, h: f64) -> Vec<f64> {
    f.breakpoints()
        .iter()
        .flat_map(|&b| (0..=r).map(move |k| b - k as f64 * h))
        .collect()
}

/// `‖Δ_h^r f‖_p(A_{rh})` for a single step, reading the a.e. representative.
pub fn difference_norm(
    f: &PointwiseFunction,
    dom: &Domain,
    r: usize,
    h: f64,
    p: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    let coeffs = difference_coefficients(r);
    let Some((lo, hi)) = difference_range(f, dom, r as f64 * h) else {
        return Ok(0.0);
    };
    let breaks = shifted_breaks(f, r, h);
    if p.is_infinite() {
        return lp_norm_of(|x| apply_difference(|t| f.eval(t), &coeffs, x, h), lo, hi, &breaks, p, q);
    }
    lp_norm_of(|x| apply_difference(|t| f.ae_value(t), &coeffs, x, h), lo, hi, &breaks, p, q)
}

/// Steps `h_i = δ i/n`, `i = 1..=n`, with the last one exactly δ.
fn step_grid(req: &ModulusRequest) -> impl Iterator<Item = f64> + '_ {
    let n = req.h_grid_size;
    (1..=n).map(move |i| if i == n { req.delta } else { req.delta * i as f64 / n as f64 })
}

/// Largest `‖Δ_h^r f‖_p` over the step grid, with the maximizing step.
fn best_step(f: &PointwiseFunction, dom: &Domain, req: &ModulusRequest, q: &QuadratureConfig) -> Result<(f64, f64)> {
    let steps: Vec<f64> = step_grid(req).collect();
    let norms: Vec<f64> = steps
        .par_iter()
        .map(|&h| difference_norm(f, dom, req.order, h, req.p, q))
        .collect::<Result<_>>()?;
    Ok(norms
        .into_iter()
        .zip(steps)
        .fold((0.0, req.delta), |best, (v, h)| if v > best.0 { (v, h) } else { best }))
}

/// ω_r(f, δ)_p, the sup over a linear step grid ending at δ.
///
/// For `p = ∞` the pointwise sup is returned; it is also bounded below by the
/// largest local modulus on a uniform x grid so that `τ_k ≤ (b-a)^{1/p} ω_k(·)_∞`
/// holds for the computed values.
pub fn modulus_of_smoothness(
    f: &PointwiseFunction,
    dom: &Domain,
    req: &ModulusRequest,
    q: &QuadratureConfig,
) -> Result<f64> {
    req.validate(dom)?;
    if req.order == 0 {
        return lp_norm(f, dom, req.p, None, q);
    }
    if req.delta == 0.0 {
        return Ok(0.0);
    }
    let (mut best, _) = best_step(f, dom, req, q)?;
    if req.p.is_infinite() {
        let samples = local_modulus_samples(f, dom, req.order, req.delta, req.t_grid_size, q)?;
        best = samples.values.iter().copied().fold(best, f64::max);
    }
    Ok(best)
}

/// ω_k(f, x; δ): oracle when available, otherwise the sup of `|Δ_h^k f(t)|`
/// over `[t, t + kh] ⊂ [x − kδ/2, x + kδ/2] ∩ A`, with t and h on a grid of
/// spacing `δ/(t_grid_size − 1)`. That grid contains every step of the default
/// ω step grid at the centered position.
pub fn local_modulus(
    f: &PointwiseFunction,
    dom: &Domain,
    k: usize,
    x: f64,
    delta: f64,
    t_grid_size: usize,
) -> Result<f64> {
    if k == 0 {
        return domain("local modulus order must be ≥ 1");
    }
    if !(delta >= 0.0) {
        return domain(format!("delta must be ≥ 0, got {delta}"));
    }
    if let Domain::Interval { a, b } = *dom {
        if k as f64 * delta > (b - a) * (1.0 + 1e-12) {
            return domain(format!("delta = {delta} exceeds (b-a)/{k}"));
        }
    }
    if t_grid_size < 2 {
        return Err(Error::Config("t grid needs ≥ 2 points".into()));
    }
    Ok(local_modulus_unchecked(f, dom, k, x, delta, t_grid_size, &mut Vec::new()))
}

fn local_modulus_unchecked(
    f: &PointwiseFunction,
    dom: &Domain,
    k: usize,
    x: f64,
    delta: f64,
    t_grid_size: usize,
    buf: &mut Vec<f64>,
) -> f64 {
    if delta == 0.0 {
        return 0.0;
    }
    if let Some(v) = f.oscillation(k, x, delta) {
        return v;
    }
    let half = k as f64 * delta / 2.0;
    let start = x - half;
    if let Some((s0, s1)) = f.support() {
        if x + half < s0 || start > s1 {
            return 0.0;
        }
    }
    let per_delta = t_grid_size - 1;
    let n = per_delta * k + 1;
    let dt = delta / per_delta as f64;
    let point = |i: usize| if i == n - 1 { x + half } else { start + i as f64 * dt };
    // Indices whose points lie in A.
    let (mut i0, mut i1) = (0, n - 1);
    if let Domain::Interval { a, b } = *dom {
        while i0 < n && point(i0) < a {
            i0 += 1;
        }
        while i1 > i0 && point(i1) > b {
            i1 -= 1;
        }
        if i0 >= i1 {
            return 0.0;
        }
    }
    buf.clear();
    buf.extend((i0..=i1).map(|i| f.eval(point(i))));
    let len = buf.len();
    let coeffs = difference_coefficients(k);
    let mut best = 0.0_f64;
    for m in 1..=per_delta {
        if k * m >= len {
            break;
        }
        for i in 0..len - k * m {
            let d: f64 = coeffs.iter().enumerate().map(|(j, c)| c * buf[i + j * m]).sum();
            best = best.max(d.abs());
        }
    }
    best
}

/// Local-modulus samples on a uniform x grid of `q.cells + 1` points.
pub struct LocalModulusSamples {
    pub lo: f64,
    pub hi: f64,
    pub values: Vec<f64>,
}

/// Range of x on which ω_k(f, x; δ) can be nonzero.
fn tau_range(f: &PointwiseFunction, dom: &Domain, k: usize, delta: f64) -> (f64, f64) {
    let (mut lo, mut hi) = dom.bounds();
    if let Some((s0, s1)) = f.support() {
        let pad = k as f64 * delta / 2.0;
        lo = lo.max(s0 - pad);
        hi = hi.min(s1 + pad);
    }
    (lo, hi)
}

pub fn local_modulus_samples(
    f: &PointwiseFunction,
    dom: &Domain,
    k: usize,
    delta: f64,
    t_grid_size: usize,
    q: &QuadratureConfig,
) -> Result<LocalModulusSamples> {
    let (lo, hi) = tau_range(f, dom, k, delta);
    if hi <= lo {
        return Ok(LocalModulusSamples { lo, hi, values: Vec::new() });
    }
    let n = q.cells.max(16);
    let dx = (hi - lo) / n as f64;
    let values = (0..=n)
        .into_par_iter()
        .map_init(Vec::new, |buf, i| {
            let x = if i == n { hi } else { lo + i as f64 * dx };
            local_modulus_unchecked(f, dom, k, x, delta, t_grid_size, buf)
        })
        .collect();
    Ok(LocalModulusSamples { lo, hi, values })
}

/// τ_k(f; δ)_p = ‖ω_k(f, ·; δ)‖_p.
///
/// The bulk of the range is integrated on the quadrature nodes of
/// `‖Δ_{h*}^k f‖_p`, shifted by `kh*/2`, where h* is the step attaining
/// ω_k(f, δ)_p. Each shifted node sees the whole difference inside its
/// window, so the computed values keep `ω_k ≤ τ_k`. The two end strips are
/// integrated separately.
pub fn tau_modulus(
    f: &PointwiseFunction,
    dom: &Domain,
    req: &ModulusRequest,
    q: &QuadratureConfig,
) -> Result<f64> {
    req.validate(dom)?;
    if req.order == 0 {
        return domain("τ-modulus order must be ≥ 1");
    }
    if req.p.is_infinite() {
        return domain("τ-modulus is defined for finite p only");
    }
    if f.regularity() == Regularity::Lp && !f.has_oscillation_oracle() {
        return Err(Error::Capability(format!(
            "{} may be unbounded and has no oscillation oracle",
            f.name()
        )));
    }
    if req.delta == 0.0 {
        return Ok(0.0);
    }
    let k = req.order;
    let (lo, hi) = tau_range(f, dom, k, req.delta);
    if hi <= lo {
        return Ok(0.0);
    }
    let mut nodes = Vec::new();
    let strip = |nodes: &mut Vec<(f64, f64)>, a: f64, b: f64| {
        if b > a {
            let cells = ((q.cells as f64) * (b - a) / (hi - lo)).ceil() as usize;
            nodes.extend(quadrature_nodes(a, b, &[], &q.clone().with_cells(cells.max(16))));
        }
    };
    let (_, h) = best_step(f, dom, req, q)?;
    let shift = k as f64 * h / 2.0;
    match difference_range(f, dom, k as f64 * h) {
        Some((c0, c1)) => {
            strip(&mut nodes, lo, (c0 + shift).min(hi));
            nodes.extend(
                quadrature_nodes(c0, c1, &shifted_breaks(f, k, h), q)
                    .into_iter()
                    .map(|(t, w)| (t + shift, w)),
            );
            strip(&mut nodes, (c1 + shift).max(lo), hi);
        }
        None => strip(&mut nodes, lo, hi),
    }
    let sum: f64 = nodes
        .par_chunks(256)
        .map_init(Vec::new, |buf, chunk| {
            chunk
                .iter()
                .map(|&(x, w)| w * local_modulus_unchecked(f, dom, k, x, req.delta, req.t_grid_size, buf).powf(req.p))
                .sum::<f64>()
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    Ok(sum.powf(1.0 / req.p))
}

/// Classification of a single ω_s / ω_{s+1} entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioFlag {
    Finite,
    /// ω_{s+1} vanishes while ω_s does not.
    Infinite,
    /// Both moduli vanish.
    Degenerate,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub delta: f64,
    pub omega_s: f64,
    pub omega_s1: f64,
    pub ratio: Option<f64>,
    pub flag: RatioFlag,
}

/// Table of ω_s(f, δ)_p / ω_{s+1}(f, δ)_p.
#[derive(Clone, Debug, Serialize)]
pub struct RatioReport {
    pub s: usize,
    pub rows: Vec<RatioRow>,
    /// Largest finite ratio, or `+∞` if any row is flagged infinite.
    pub max_ratio: f64,
    /// Decay fit of the finite ratios against δ; a clearly negative order
    /// means the ratios blow up as δ → 0.
    pub trend: Option<RateReport>,
    pub degenerate: bool,
}

impl RatioReport {
    /// Ratios stay bounded over the grid (no infinite rows, no blow-up trend).
    pub fn bounded(&self) -> bool {
        if self.degenerate || self.max_ratio.is_infinite() {
            return false;
        }
        match &self.trend {
            Some(t) if t.is_valid() => t.fitted_order > -0.25,
            _ => true,
        }
    }
}

const ZERO_MODULUS: f64 = 1e-13;

pub fn modulus_ratio(
    f: &PointwiseFunction,
    dom: &Domain,
    s: usize,
    delta_grid: &[f64],
    p: f64,
    q: &QuadratureConfig,
) -> Result<RatioReport> {
    if delta_grid.is_empty() {
        return Err(Error::Config("delta grid is empty".into()));
    }
    let mut rows = Vec::with_capacity(delta_grid.len());
    for &delta in delta_grid {
        let ws = modulus_of_smoothness(f, dom, &ModulusRequest::new(s, delta, p), q)?;
        let ws1 = modulus_of_smoothness(f, dom, &ModulusRequest::new(s + 1, delta, p), q)?;
        let (ratio, flag) = match (ws > ZERO_MODULUS, ws1 > ZERO_MODULUS) {
            (_, true) => (Some(ws / ws1), RatioFlag::Finite),
            (true, false) => (None, RatioFlag::Infinite),
            (false, false) => (None, RatioFlag::Degenerate),
        };
        rows.push(RatioRow { delta, omega_s: ws, omega_s1: ws1, ratio, flag });
    }
    let degenerate = rows.iter().all(|r| r.flag == RatioFlag::Degenerate);
    let max_ratio = if rows.iter().any(|r| r.flag == RatioFlag::Infinite) {
        f64::INFINITY
    } else {
        rows.iter().filter_map(|r| r.ratio).fold(0.0, f64::max)
    };
    let finite: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.ratio.map(|v| (r.delta, v))).collect();
    let trend = (finite.len() >= 2).then(|| fit_decay(&finite));
    Ok(RatioReport { s, rows, max_ratio, trend, degenerate })
}
