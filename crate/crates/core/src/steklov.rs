//! Steklov averages f̃_{δ,r} on the line and on intervals.
//!
//! The r-fold mean over `[0, δ]^r` depends on `t_1 + … + t_r` only, so it
//! reduces to a single integral against the Irwin–Hall density of that sum.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::func::{binomial, integrate, Domain, PointwiseFunction, QuadratureConfig, Regularity};

/// Density of the sum of `r` independent Uniform(0, 1) variables.
pub fn irwin_hall_density(r: usize, u: f64) -> f64 {
    if r == 0 || !(u >= 0.0) || u > r as f64 {
        return 0.0;
    }
    if r == 1 {
        return if u < 1.0 { 1.0 } else { 0.0 };
    }
    let v = u.min(r as f64 - u);
    let mut sum = 0.0;
    for k in 0..=(v.floor() as usize) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binomial(r, k) * (v - k as f64).powi(r as i32 - 1);
    }
    let fact: f64 = (1..r).map(|i| i as f64).product();
    (sum / fact).max(0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteklovSpec {
    pub delta: f64,
    pub r: usize,
    /// Quadrature cells per unit of the Irwin–Hall variable.
    #[serde(default = "default_u_grid")]
    pub u_grid: usize,
}

fn default_u_grid() -> usize {
    256
}

impl SteklovSpec {
    pub fn new(delta: f64, r: usize) -> Self {
        Self { delta, r, u_grid: default_u_grid() }
    }

    pub fn validate(&self, dom: &Domain) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return domain(format!("Steklov delta must be positive, got {}", self.delta));
        }
        if self.r == 0 {
            return domain("Steklov order must be ≥ 1");
        }
        if self.u_grid < 16 {
            return Err(Error::Config(format!("u_grid must be ≥ 16, got {}", self.u_grid)));
        }
        if let Domain::Interval { a, b } = *dom {
            if self.r as f64 * self.delta > (b - a) * (1.0 + 1e-12) {
                return domain(format!(
                    "Steklov delta = {} exceeds (b-a)/r = {}",
                    self.delta,
                    (b - a) / self.r as f64
                ));
            }
        }
        Ok(())
    }

    fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig::default().with_cells(self.u_grid)
    }
}

/// Signed weights `(-1)^{m+1} C(r, m)` for `m = 1..=r`.
fn steklov_weights(r: usize) -> Vec<f64> {
    (1..=r)
        .map(|m| if m % 2 == 1 { binomial(r, m) } else { -binomial(r, m) })
        .collect()
}

/// `∫_0^r IH_r(u) f_ae(base + slope·u) du`, split at the density knots and at
/// the preimages of the breakpoints of f.
fn reduced_integral(f: &PointwiseFunction, r: usize, base: f64, slope: f64, q: &QuadratureConfig) -> f64 {
    let (mut u_lo, mut u_hi) = (0.0_f64, r as f64);
    if let Some((s0, s1)) = f.support() {
        u_lo = u_lo.max((s0 - base) / slope);
        u_hi = u_hi.min((s1 - base) / slope);
        if u_hi <= u_lo {
            return 0.0;
        }
    }
    let breaks: Vec<f64> = f.breakpoints().iter().map(|&b| (b - base) / slope).collect();
    let g = |u: f64| irwin_hall_density(r, u) * f.ae_value(base + slope * u);
    (0..r)
        .map(|j| {
            let (lo, hi) = ((j as f64).max(u_lo), ((j + 1) as f64).min(u_hi));
            if hi <= lo {
                0.0
            } else {
                integrate(g, lo, hi, &breaks, q)
            }
        })
        .sum()
}

fn steklov_line_at(f: &PointwiseFunction, spec: &SteklovSpec, weights: &[f64], q: &QuadratureConfig, x: f64) -> f64 {
    let r = spec.r;
    weights
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let m = (i + 1) as f64;
            w * reduced_integral(f, r, x, m * spec.delta / r as f64, q)
        })
        .sum()
}

/// Excursion beyond which an interval argument signals a broken invariant.
const EXCURSION_LIMIT: f64 = 1e-9;

/// Value of the interval Steklov average at `x ∈ [a, b]`.
pub fn steklov_interval_at(f: &PointwiseFunction, a: f64, b: f64, spec: &SteklovSpec, x: f64) -> Result<f64> {
    let r = spec.r;
    let c = (x - a) * spec.delta / (b - a);
    let q = spec.quadrature();
    let mut total = 0.0;
    for (i, w) in steklov_weights(r).iter().enumerate() {
        let m = (i + 1) as f64;
        let base = x - m * c;
        let slope = m * spec.delta / r as f64;
        let (lo, hi) = (base, base + slope * r as f64);
        let tol = EXCURSION_LIMIT * (b - a).max(1.0);
        if lo < a - tol || hi > b + tol {
            return Err(Error::Internal(format!(
                "Steklov argument range [{lo}, {hi}] leaves [{a}, {b}] at x = {x}"
            )));
        }
        let clamped = |u: f64| f.ae_value((base + slope * u).clamp(a, b));
        let (mut u_lo, mut u_hi) = (0.0_f64, r as f64);
        if let Some((s0, s1)) = f.support() {
            u_lo = u_lo.max((s0 - base) / slope);
            u_hi = u_hi.min((s1 - base) / slope);
        }
        let breaks: Vec<f64> = f.breakpoints().iter().map(|&bp| (bp - base) / slope).collect();
        let g = |u: f64| irwin_hall_density(r, u) * clamped(u);
        let integral: f64 = (0..r)
            .map(|j| {
                let (lo, hi) = ((j as f64).max(u_lo), ((j + 1) as f64).min(u_hi));
                if hi <= lo { 0.0 } else { integrate(g, lo, hi, &breaks, &q) }
            })
            .sum();
        total += w * integral;
    }
    Ok(total)
}

fn average_breakpoints(f: &PointwiseFunction, spec: &SteklovSpec) -> Vec<f64> {
    let r = spec.r;
    let mut out = Vec::new();
    for &b in f.breakpoints() {
        for m in 1..=r {
            for j in 0..=r {
                out.push(b - m as f64 * spec.delta * j as f64 / r as f64);
            }
        }
    }
    out
}

/// f̃_{δ,r} on the real line.
pub fn steklov_line(f: &PointwiseFunction, dom: &Domain, spec: &SteklovSpec) -> Result<PointwiseFunction> {
    if !dom.is_line() {
        return domain("steklov_line needs a line domain");
    }
    spec.validate(dom)?;
    let (g, s, w, q) = (f.clone(), spec.clone(), steklov_weights(spec.r), spec.quadrature());
    let mut out = PointwiseFunction::new(
        format!("steklov[{};δ={},r={}]", f.name(), spec.delta, spec.r),
        move |x| steklov_line_at(&g, &s, &w, &q, x),
    )
    .with_regularity(Regularity::Sobolev(spec.r as u32))
    .with_breakpoints(average_breakpoints(f, spec));
    if let Some((s0, s1)) = f.support() {
        out = out.with_support(s0 - spec.r as f64 * spec.delta, s1);
    }
    Ok(out)
}

/// f̃_{δ,r} on `[a, b]`; arguments are shifted by θ_x so they never leave the interval.
/// Evaluation outside `[a, b]` yields NaN.
pub fn steklov_interval(f: &PointwiseFunction, dom: &Domain, spec: &SteklovSpec) -> Result<PointwiseFunction> {
    let Domain::Interval { a, b } = *dom else {
        return domain("steklov_interval needs an interval domain");
    };
    spec.validate(dom)?;
    let (g, s) = (f.clone(), spec.clone());
    let mut out = PointwiseFunction::new(
        format!("steklov[{};δ={},r={}]", f.name(), spec.delta, spec.r),
        move |x| steklov_interval_at(&g, a, b, &s, x).unwrap_or(f64::NAN),
    )
    .with_regularity(Regularity::Sobolev(spec.r as u32))
    .with_breakpoints(f.breakpoints().to_vec());
    if let Some((s0, s1)) = f.support() {
        out = out.with_support(s0.max(a), s1.min(b));
    }
    Ok(out)
}

/// Dispatches to [`steklov_line`] or [`steklov_interval`].
pub fn steklov_average(f: &PointwiseFunction, dom: &Domain, spec: &SteklovSpec) -> Result<PointwiseFunction> {
    match dom {
        Domain::Line { .. } => steklov_line(f, dom, spec),
        Domain::Interval { .. } => steklov_interval(f, dom, spec),
    }
}

/// Maximum r accepted by [`steklov_oracle_nested`].
pub const NESTED_MAX_ORDER: usize = 3;
const NESTED_CELLS: usize = 16;

/// The same average by literal r-fold iterated Gauss quadrature over `[0, δ]^r`.
pub fn steklov_oracle_nested(f: &PointwiseFunction, dom: &Domain, spec: &SteklovSpec) -> Result<PointwiseFunction> {
    spec.validate(dom)?;
    let r = spec.r;
    if r > NESTED_MAX_ORDER {
        return Err(Error::Capability(format!(
            "nested Steklov quadrature supports r ≤ {NESTED_MAX_ORDER}, got {r}"
        )));
    }
    // Tensor Gauss–Legendre nodes on [0, δ].
    let g = 0.5 * (0.6f64).sqrt();
    let h = spec.delta / NESTED_CELLS as f64;
    let mut nodes = Vec::with_capacity(3 * NESTED_CELLS);
    for c in 0..NESTED_CELLS {
        for (s, w) in [(0.5 - g, 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.5 + g, 5.0 / 18.0)] {
            nodes.push(((c as f64 + s) * h, w * h));
        }
    }
    let weights = steklov_weights(r);
    let (func, delta, dom) = (f.clone(), spec.delta, *dom);
    Ok(PointwiseFunction::new(format!("steklov_nested[{}]", f.name()), move |x| {
        let shift = match dom {
            Domain::Interval { a, b } => (x - a) * delta / (b - a),
            Domain::Line { .. } => 0.0,
        };
        let mut total = 0.0;
        let mut idx = vec![0usize; r];
        loop {
            let (mut sum_t, mut w) = (0.0, 1.0);
            for &i in &idx {
                sum_t += nodes[i].0;
                w *= nodes[i].1;
            }
            let theta = sum_t / r as f64 - shift;
            let v: f64 = weights
                .iter()
                .enumerate()
                .map(|(i, c)| c * func.ae_value(x + (i + 1) as f64 * theta))
                .sum();
            total += w * v;
            let mut d = 0;
            while d < r {
                idx[d] += 1;
                if idx[d] < nodes.len() {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == r {
                break;
            }
        }
        total / delta.powi(r as i32)
    }))
}

/// s-th derivative of f̃_{δ,r} by a finite-difference stencil with step δ/64,
/// shifted to stay inside `[a, b]` near the interval ends.
pub fn steklov_derivative(
    f: &PointwiseFunction,
    dom: &Domain,
    spec: &SteklovSpec,
    s: usize,
) -> Result<PointwiseFunction> {
    if s > spec.r {
        return domain(format!("derivative order {s} exceeds Steklov order {}", spec.r));
    }
    let avg = steklov_average(f, dom, spec)?;
    if s == 0 {
        return Ok(avg);
    }
    let step = spec.delta / 64.0;
    let span = s as f64 * step;
    let coeffs: Vec<f64> = (0..=s)
        .map(|k| {
            let sign = if (s - k) % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(s, k)
        })
        .collect();
    let scale = step.powi(-(s as i32));
    let bounds = match *dom {
        Domain::Interval { a, b } => Some((a, b)),
        Domain::Line { .. } => None,
    };
    let g = avg.clone();
    let mut out = PointwiseFunction::new(format!("d{s}/dx {}", avg.name()), move |x| {
        let mut start = x - span / 2.0;
        if let Some((a, b)) = bounds {
            start = start.clamp(a, b - span);
        }
        scale
            * coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * g.eval(start + k as f64 * step))
                .sum::<f64>()
    })
    .with_breakpoints(avg.breakpoints().to_vec());
    if let Some((s0, s1)) = avg.support() {
        out = out.with_support(s0 - span, s1 + span);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{builtin, params, Params};
    use serde_json::json;

    #[test]
    fn irwin_hall_values() {
        assert_eq!(irwin_hall_density(1, 0.5), 1.0);
        assert_eq!(irwin_hall_density(1, 1.0), 0.0);
        assert!((irwin_hall_density(2, 1.0) - 1.0).abs() < 1e-15);
        assert!((irwin_hall_density(3, 1.5) - 0.75).abs() < 1e-15);
        assert_eq!(irwin_hall_density(3, -0.1), 0.0);
        assert_eq!(irwin_hall_density(3, 3.1), 0.0);
    }

    #[test]
    fn irwin_hall_matches_histogram_convolution() {
        // Convolve the uniform density with itself twice on a fine grid.
        let n = 2000;
        let h = 1.0 / n as f64;
        let box_ = vec![1.0; n];
        let conv = |a: &[f64], b: &[f64]| {
            let mut out = vec![0.0; a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i + j] += x * y * h;
                }
            }
            out
        };
        let two = conv(&box_, &box_);
        let three = conv(&two, &box_);
        let idx = (1.5 / h) as usize;
        assert!((three[idx] - 0.75).abs() < 2e-3, "{}", three[idx]);
    }

    #[test]
    fn irwin_hall_integrates_to_one() {
        let q = QuadratureConfig::default();
        for r in 1..=8 {
            let v: f64 = (0..r)
                .map(|j| integrate(|u| irwin_hall_density(r, u), j as f64, (j + 1) as f64, &[], &q))
                .sum();
            assert!((v - 1.0).abs() < 1e-13, "r={r}: {v}");
        }
    }

    #[test]
    fn constants_are_reproduced() {
        let c = PointwiseFunction::constant(2.5);
        for r in 1..=5 {
            let spec = SteklovSpec::new(0.1, r);
            let g = steklov_line(&c, &Domain::line(), &spec).unwrap();
            let h = steklov_interval(&c, &Domain::interval(0.0, 1.0).unwrap(), &spec).unwrap();
            for x in [0.0, 0.37, 1.0] {
                assert!((g.eval(x) - 2.5).abs() < 1e-12);
                assert!((h.eval(x) - 2.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_examples() {
        let id = PointwiseFunction::new("x", |x| x);
        let g = steklov_line(&id, &Domain::line(), &SteklovSpec::new(0.2, 1)).unwrap();
        assert!((g.eval(0.3) - 0.4).abs() < 1e-14);
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let h = steklov_interval(&id, &dom, &SteklovSpec::new(0.2, 1)).unwrap();
        assert!((h.eval(0.5) - 0.5).abs() < 1e-14);
        for x in [0.0, 0.25, 1.0] {
            assert!((h.eval(x) - (x + 0.2 * (0.5 - x))).abs() < 1e-14);
        }
    }

    #[test]
    fn interval_matches_line_formula_at_left_end() {
        let f = builtin("gaussian_bump", &Params::new()).unwrap();
        let spec = SteklovSpec::new(0.3, 3);
        let on_line = steklov_line(&f, &Domain::line(), &spec).unwrap();
        let on_int = steklov_interval(&f, &Domain::interval(-0.4, 1.5).unwrap(), &spec).unwrap();
        assert!((on_line.eval(-0.4) - on_int.eval(-0.4)).abs() < 1e-14);
    }

    #[test]
    fn dirichlet_average_vanishes() {
        let d = builtin("dirichlet", &Params::new()).unwrap();
        let g = steklov_line(&d, &Domain::line(), &SteklovSpec::new(0.25, 2)).unwrap();
        for x in [0.0, 0.5, 1.0 / 3.0] {
            assert_eq!(g.eval(x), 0.0);
        }
    }

    #[test]
    fn nested_oracle_agrees() {
        let f = builtin("gaussian_bump", &params(&[("width", json!(0.5))])).unwrap();
        for r in 1..=3 {
            let spec = SteklovSpec::new(0.2, r);
            let a = steklov_line(&f, &Domain::line(), &spec).unwrap();
            let b = steklov_oracle_nested(&f, &Domain::line(), &spec).unwrap();
            for i in 0..20 {
                let x = -1.0 + 0.1 * i as f64;
                assert!((a.eval(x) - b.eval(x)).abs() < 1e-6);
            }
        }
        let sq = PointwiseFunction::new("x^2", |x| x * x);
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let spec = SteklovSpec::new(0.2, 2);
        let a = steklov_interval(&sq, &dom, &spec).unwrap();
        let b = steklov_oracle_nested(&sq, &dom, &spec).unwrap();
        for x in [0.0, 0.3, 0.9, 1.0] {
            assert!((a.eval(x) - b.eval(x)).abs() < 1e-6);
        }
        assert!(matches!(
            steklov_oracle_nested(&sq, &dom, &SteklovSpec::new(0.1, 4)),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn derivative_examples() {
        let id = PointwiseFunction::new("x", |x| x);
        let d = steklov_derivative(&id, &Domain::line(), &SteklovSpec::new(0.2, 1), 1).unwrap();
        for x in [-1.0, 0.0, 2.5] {
            assert!((d.eval(x) - 1.0).abs() < 1e-9);
        }
        let c = PointwiseFunction::constant(4.0);
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let d = steklov_derivative(&c, &dom, &SteklovSpec::new(0.2, 2), 2).unwrap();
        for x in [0.0, 0.5, 1.0] {
            assert!(d.eval(x).abs() < 1e-6);
        }
        assert!(steklov_derivative(&c, &dom, &SteklovSpec::new(0.2, 2), 3).is_err());
    }

    #[test]
    fn spec_validation() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        assert!(SteklovSpec::new(0.5, 3).validate(&dom).is_err());
        assert!(SteklovSpec::new(0.25, 4).validate(&dom).is_ok());
        assert!(SteklovSpec::new(-0.1, 1).validate(&Domain::line()).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::test_runner::Config::with_cases(32))]

        #[test]
        fn linearity(alpha in -3.0f64..3.0, beta in -3.0f64..3.0, x in -2.0f64..2.0, r in 1usize..5) {
            let f = builtin("gaussian_bump", &Params::new()).unwrap();
            let g = builtin("bspline", &params(&[("order", json!(3))])).unwrap();
            let spec = SteklovSpec::new(0.15, r);
            let line = Domain::line();
            let combo = PointwiseFunction::linear_combination(&[(alpha, &f), (beta, &g)]);
            let lhs = steklov_line(&combo, &line, &spec).unwrap().eval(x);
            let rhs = alpha * steklov_line(&f, &line, &spec).unwrap().eval(x)
                + beta * steklov_line(&g, &line, &spec).unwrap().eval(x);
            proptest::prop_assert!((lhs - rhs).abs() < 1e-10);
        }
    }
}
