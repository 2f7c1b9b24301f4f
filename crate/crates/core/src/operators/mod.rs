//! Bernstein polynomials, the truncated Shannon series and generalized
//! sampling operators.

mod kernel;

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

pub use kernel::{
    kernel_by_name, m0_moment, partition_of_unity_defect, strang_fix_defect, KernelSpec, MOMENT_GRID,
};

use crate::error::{domain, Error, Result};
use crate::func::{binomial, lp_norm, Domain, PointwiseFunction, QuadratureConfig};

/// Smallest accepted Shannon truncation half-width.
pub const MIN_TRUNC_TERMS: usize = 64;
pub const DEFAULT_TRUNC_TERMS: usize = 4096;

#[derive(Clone, Debug)]
pub enum OperatorFamily {
    Bernstein { n: usize },
    Shannon { w: f64, trunc_terms: usize },
    Generalized { w: f64, kernel: KernelSpec },
}

/// Serializable description of an operator instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorLabel {
    pub family: String,
    pub scale: f64,
}

impl OperatorFamily {
    pub fn bernstein(n: usize) -> Self {
        OperatorFamily::Bernstein { n }
    }

    pub fn shannon(w: f64) -> Self {
        OperatorFamily::Shannon { w, trunc_terms: DEFAULT_TRUNC_TERMS }
    }

    pub fn generalized(w: f64, kernel: KernelSpec) -> Self {
        OperatorFamily::Generalized { w, kernel }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OperatorFamily::Bernstein { n } if *n == 0 => domain("Bernstein degree must be ≥ 1"),
            OperatorFamily::Shannon { w, trunc_terms } => {
                if !(*w > 0.0 && w.is_finite()) {
                    return domain(format!("W must be positive, got {w}"));
                }
                if *trunc_terms < MIN_TRUNC_TERMS {
                    return Err(Error::Config(format!(
                        "Shannon truncation needs ≥ {MIN_TRUNC_TERMS} terms, got {trunc_terms}"
                    )));
                }
                Ok(())
            }
            OperatorFamily::Generalized { w, .. } if !(*w > 0.0 && w.is_finite()) => {
                domain(format!("W must be positive, got {w}"))
            }
            _ => Ok(()),
        }
    }

    /// `n` for Bernstein, `W` otherwise.
    pub fn scale(&self) -> f64 {
        match self {
            OperatorFamily::Bernstein { n } => *n as f64,
            OperatorFamily::Shannon { w, .. } | OperatorFamily::Generalized { w, .. } => *w,
        }
    }

    /// The same family at another scale (rounded for Bernstein).
    pub fn at_scale(&self, scale: f64) -> Self {
        match self {
            OperatorFamily::Bernstein { .. } => OperatorFamily::Bernstein { n: scale.round().max(1.0) as usize },
            OperatorFamily::Shannon { trunc_terms, .. } => {
                OperatorFamily::Shannon { w: scale, trunc_terms: *trunc_terms }
            }
            OperatorFamily::Generalized { kernel, .. } => {
                OperatorFamily::Generalized { w: scale, kernel: kernel.clone() }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            OperatorFamily::Bernstein { .. } => "bernstein".into(),
            OperatorFamily::Shannon { .. } => "shannon".into(),
            OperatorFamily::Generalized { kernel, .. } => format!("sampling[{}]", kernel.name()),
        }
    }

    pub fn label(&self) -> OperatorLabel {
        OperatorLabel { family: self.name(), scale: self.scale() }
    }

    /// Whether `G(f)(ξ) = f(ξ)` on every node of the family.
    pub fn interpolates(&self) -> bool {
        matches!(self, OperatorFamily::Shannon { .. })
    }

    pub fn check_domain(&self, dom: &Domain) -> Result<()> {
        match (self, dom) {
            (OperatorFamily::Bernstein { .. }, Domain::Interval { a, b }) if *a == 0.0 && *b == 1.0 => Ok(()),
            (OperatorFamily::Bernstein { .. }, _) => domain(format!("Bernstein operators act on [0,1], not {dom}")),
            (_, Domain::Line { .. }) => Ok(()),
            _ => domain(format!("{} acts on the line, not {dom}", self.name())),
        }
    }

    /// `G(f)` as a function.
    pub fn apply(&self, f: &PointwiseFunction, dom: &Domain) -> Result<PointwiseFunction> {
        self.validate()?;
        self.check_domain(dom)?;
        Ok(match self {
            OperatorFamily::Bernstein { n } => bernstein_apply(f, *n),
            OperatorFamily::Shannon { w, trunc_terms } => shannon_apply(f, dom, *w, *trunc_terms).into_function(),
            OperatorFamily::Generalized { w, kernel } => generalized_sampling_apply(f, *w, kernel),
        })
    }

    /// `(G(f))^{(s)}`: closed form for Bernstein, central differences with
    /// step `1/(64W)` otherwise.
    pub fn derivative(&self, f: &PointwiseFunction, dom: &Domain, s: usize) -> Result<PointwiseFunction> {
        match self {
            OperatorFamily::Bernstein { n } => {
                self.check_domain(dom)?;
                bernstein_derivative(f, *n, s)
            }
            _ => {
                let g = self.apply(f, dom)?;
                Ok(central_derivative(&g, s, 1.0 / (64.0 * self.scale())))
            }
        }
    }

    /// Integration range and cell count that resolve the output on `dom`.
    pub(crate) fn error_quadrature(&self, f: &PointwiseFunction, dom: &Domain, q: &QuadratureConfig) -> ((f64, f64), QuadratureConfig) {
        let (mut lo, mut hi) = dom.bounds();
        if let (OperatorFamily::Generalized { w, kernel }, Some((s0, s1))) = (self, f.support()) {
            let (t0, t1) = kernel.support();
            lo = lo.max(s0 + t0 / w - 1.0 / w);
            hi = hi.min(s1 + t1 / w + 1.0 / w);
        }
        let cells = match self {
            OperatorFamily::Bernstein { n } => 8 * n,
            _ => (8.0 * self.scale() * (hi - lo)).ceil() as usize,
        };
        ((lo, hi), q.clone().with_cells(q.cells.max(cells)))
    }
}

/// `s`-th central difference quotient with step `h`.
pub fn central_derivative(g: &PointwiseFunction, s: usize, h: f64) -> PointwiseFunction {
    if s == 0 {
        return g.clone();
    }
    let coeffs: Vec<f64> = (0..=s)
        .map(|k| if (s - k) % 2 == 0 { binomial(s, k) } else { -binomial(s, k) })
        .collect();
    let scale = h.powi(-(s as i32));
    let half = s as f64 * h / 2.0;
    let inner = g.clone();
    let mut out = PointwiseFunction::new(format!("d{s}/dx {}", g.name()), move |x| {
        scale * coeffs.iter().enumerate().map(|(k, c)| c * inner.eval(x - half + k as f64 * h)).sum::<f64>()
    });
    if let Some((s0, s1)) = g.support() {
        out = out.with_support(s0 - half, s1 + half);
    }
    out
}

/// Evaluates `Σ_k c_k C(m,k) x^k (1-x)^{m-k}` by de Casteljau's recurrence.
fn de_casteljau(coeffs: &[f64], x: f64, buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    buf.extend_from_slice(coeffs);
    let y = 1.0 - x;
    for level in 1..coeffs.len() {
        for i in 0..coeffs.len() - level {
            buf[i] = y * buf[i] + x * buf[i + 1];
        }
    }
    buf[0]
}

/// `B_n f(x) = Σ_k f(k/n) C(n,k) x^k (1-x)^{n-k}`.
pub fn bernstein_apply(f: &PointwiseFunction, n: usize) -> PointwiseFunction {
    let samples: Vec<f64> = (0..=n).map(|k| f.eval(k as f64 / n as f64)).collect();
    PointwiseFunction::new(format!("B_{n}[{}]", f.name()), move |x| {
        de_casteljau(&samples, x, &mut Vec::with_capacity(n + 1))
    })
}

/// `(B_n f)^{(s)}(x) = n!/(n-s)! Σ_k Δ^s_{1/n} f(k/n) C(n-s,k) x^k (1-x)^{n-s-k}`.
pub fn bernstein_derivative(f: &PointwiseFunction, n: usize, s: usize) -> Result<PointwiseFunction> {
    if s > n {
        return domain(format!("derivative order {s} exceeds degree {n}"));
    }
    let mut diffs: Vec<f64> = (0..=n).map(|k| f.eval(k as f64 / n as f64)).collect();
    for _ in 0..s {
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
    }
    let factor: f64 = (0..s).map(|i| (n - i) as f64).product();
    let coeffs: Vec<f64> = diffs.iter().map(|d| d * factor).collect();
    Ok(PointwiseFunction::new(format!("d{s}/dx B_{n}[{}]", f.name()), move |x| {
        de_casteljau(&coeffs, x, &mut Vec::with_capacity(coeffs.len()))
    }))
}

/// A truncated Shannon series with its samples precomputed.
pub struct ShannonSeries {
    w: f64,
    trunc: i64,
    k_lo: i64,
    samples: Arc<Vec<f64>>,
    name: String,
}

impl ShannonSeries {
    fn value(&self, t: f64) -> f64 {
        let wt = self.w * t;
        let j = wt.round();
        let eps = wt - j;
        let j = j as i64;
        let k_hi = self.k_lo + self.samples.len() as i64 - 1;
        if eps == 0.0 {
            return if (self.k_lo..=k_hi).contains(&j) { self.samples[(j - self.k_lo) as usize] } else { 0.0 };
        }
        let lo = self.k_lo.max(j - self.trunc);
        let hi = k_hi.min(j + self.trunc);
        if lo > hi {
            return 0.0;
        }
        // sinc(ε + j - k) = sin(πε)(-1)^{j-k} / (π(ε + j - k))
        let mut sum = 0.0;
        for k in lo..=hi {
            let sign = if (j - k) % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * self.samples[(k - self.k_lo) as usize] / (eps + (j - k) as f64);
        }
        (PI * eps).sin() / PI * sum
    }

    /// Bound on the truncated part of the series at t, from the samples
    /// inside the window: `Σ_{|k-j|>T} |f(k/W)| / (π (T - 1/2))`.
    pub fn tail_bound(&self, t: f64) -> f64 {
        let j = (self.w * t).round() as i64;
        let mass: f64 = self
            .samples
            .iter()
            .enumerate()
            .filter(|(i, _)| (self.k_lo + *i as i64 - j).abs() > self.trunc)
            .map(|(_, v)| v.abs())
            .sum();
        mass / (PI * (self.trunc as f64 - 0.5))
    }

    pub fn into_function(self) -> PointwiseFunction {
        let name = self.name.clone();
        PointwiseFunction::new(name, move |t| self.value(t))
    }
}

/// `S_W f(t) = Σ f(k/W) sinc(Wt - k)` over `|k - round(Wt)| ≤ trunc_terms`,
/// with samples taken on the lattice inside the domain window (or the support of f).
pub fn shannon_apply(f: &PointwiseFunction, dom: &Domain, w: f64, trunc_terms: usize) -> ShannonSeries {
    let (mut lo, mut hi) = dom.bounds();
    if let Some((s0, s1)) = f.support() {
        lo = lo.max(s0);
        hi = hi.min(s1);
    }
    let k_lo = (lo * w - 1e-9).ceil() as i64;
    let k_hi = (hi * w + 1e-9).floor() as i64;
    let samples: Vec<f64> = (k_lo..=k_hi).map(|k| f.eval(k as f64 / w)).collect();
    ShannonSeries {
        w,
        trunc: trunc_terms as i64,
        k_lo,
        samples: Arc::new(samples),
        name: format!("S_{w}[{}]", f.name()),
    }
}

/// `S_W^φ f(t) = Σ f(k/W) φ(Wt - k)`, summing the finitely many contributing k.
pub fn generalized_sampling_apply(f: &PointwiseFunction, w: f64, kernel: &KernelSpec) -> PointwiseFunction {
    let (g, phi) = (f.clone(), kernel.clone());
    let mut out = PointwiseFunction::new(format!("S_{w}^{}[{}]", kernel.name(), f.name()), move |t| {
        let u = w * t;
        phi.shifts(u).map(|k| g.eval(k as f64 / w) * phi.eval(u - k as f64)).sum()
    });
    if let Some((s0, s1)) = f.support() {
        let (t0, t1) = kernel.support();
        out = out.with_support(s0 + t0 / w, s1 + t1 / w);
    }
    out
}

/// `‖f - G(f)‖_p` with the a.e. representative of f inside the integral.
pub fn operator_error(
    f: &PointwiseFunction,
    family: &OperatorFamily,
    dom: &Domain,
    p: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    let g = family.apply(f, dom)?;
    let diff = f.minus(&g);
    let ((lo, hi), fine) = family.error_quadrature(f, dom, q);
    if hi <= lo {
        return Ok(0.0);
    }
    lp_norm(&diff.with_support(lo, hi), dom, p, Some((lo, hi)), &fine)
}

/// `‖G(f)‖_p` over the same range as [`operator_error`].
pub fn operator_norm(
    f: &PointwiseFunction,
    family: &OperatorFamily,
    dom: &Domain,
    p: f64,
    q: &QuadratureConfig,
) -> Result<f64> {
    let g = family.apply(f, dom)?;
    let ((lo, hi), fine) = family.error_quadrature(f, dom, q);
    if hi <= lo {
        return Ok(0.0);
    }
    lp_norm(&g, dom, p, Some((lo, hi)), &fine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{builtin, params, Params};
    use serde_json::json;

    fn unit() -> Domain {
        Domain::interval(0.0, 1.0).unwrap()
    }

    #[test]
    fn bernstein_reproduces_affine() {
        let c = PointwiseFunction::constant(3.0);
        let id = PointwiseFunction::new("x", |x| 2.0 * x - 1.0);
        for n in [1, 7, 64, 4096] {
            let bc = bernstein_apply(&c, n);
            let bi = bernstein_apply(&id, n);
            for x in [0.0, 0.3, 0.77, 1.0] {
                assert!((bc.eval(x) - 3.0).abs() < 1e-12);
                assert!((bi.eval(x) - (2.0 * x - 1.0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bernstein_square() {
        let sq = PointwiseFunction::new("x^2", |x| x * x);
        let direct = |n: usize, x: f64| -> f64 {
            (0..=n)
                .map(|k| {
                    let t = k as f64 / n as f64;
                    t * t * binomial(n, k) * x.powi(k as i32) * (1.0 - x).powi((n - k) as i32)
                })
                .sum()
        };
        let b = bernstein_apply(&sq, 10);
        assert!((b.eval(0.5) - 0.275).abs() < 1e-15);
        assert!((b.eval(0.2) - direct(10, 0.2)).abs() < 1e-14);
        let d = bernstein_derivative(&sq, 10, 1).unwrap();
        assert!((d.eval(0.5) - 1.0).abs() < 1e-13);
        for x in [0.1, 0.6] {
            assert!((d.eval(x) - (2.0 * x + (1.0 - 2.0 * x) / 10.0)).abs() < 1e-13);
        }
        let d2 = bernstein_derivative(&PointwiseFunction::new("x", |x| x), 10, 2).unwrap();
        assert!(d2.eval(0.4).abs() < 1e-12);
        assert!(bernstein_derivative(&sq, 3, 4).is_err());
    }

    #[test]
    fn bernstein_derivative_matches_differences() {
        let f = builtin("gaussian_bump", &params(&[("center", json!(0.4)), ("width", json!(0.3))])).unwrap();
        let n = 40;
        let b = bernstein_apply(&f, n);
        for s in 1..=3 {
            let closed = bernstein_derivative(&f, n, s).unwrap();
            let fd = central_derivative(&b, s, 1e-3);
            for x in [0.2, 0.5, 0.8] {
                let (a, c) = (closed.eval(x), fd.eval(x));
                assert!((a - c).abs() < 1e-3 * a.abs().max(1.0), "s={s} x={x}: {a} vs {c}");
            }
        }
    }

    #[test]
    fn bernstein_error_for_square() {
        let sq = PointwiseFunction::new("x^2", |x| x * x);
        let q = QuadratureConfig::default();
        let e = operator_error(&sq, &OperatorFamily::bernstein(10), &unit(), f64::INFINITY, &q).unwrap();
        assert!((e - 0.025).abs() < 1e-6);
    }

    #[test]
    fn shannon_interpolates() {
        let f = builtin("gaussian_bump", &Params::new()).unwrap();
        let s = shannon_apply(&f, &Domain::line(), 4.0, DEFAULT_TRUNC_TERMS).into_function();
        for j in -20..=20 {
            let t = j as f64 / 4.0;
            assert!((s.eval(t) - f.eval(t)).abs() < 1e-12);
        }
        let zero = PointwiseFunction::new("sin(pi x)", |x: f64| (PI * x).sin());
        let s = shannon_apply(&zero, &Domain::line_window(-8.0, 8.0).unwrap(), 1.0, 64).into_function();
        for t in [0.3, 1.7, -2.2] {
            assert!(s.eval(t).abs() < 1e-12);
        }
    }

    #[test]
    fn shannon_reconstructs_band_limited_packet() {
        let f = builtin("sinc_packet", &Params::new()).unwrap();
        let dom = Domain::line();
        let q = QuadratureConfig::default();
        let err = operator_error(&f, &OperatorFamily::shannon(2.0), &dom, 2.0, &q).unwrap();
        assert!(err < 1e-4, "{err}");
        let series = shannon_apply(&f, &dom, 2.0, 64);
        assert!(series.tail_bound(0.0) > 0.0);
    }

    #[test]
    fn generalized_sampling_examples() {
        let hat = KernelSpec::bspline(2).unwrap();
        let c = PointwiseFunction::constant(1.5);
        let id = PointwiseFunction::new("x", |x| x);
        let sc = generalized_sampling_apply(&c, 8.0, &hat);
        let si = generalized_sampling_apply(&id, 8.0, &hat);
        for t in [-1.3, 0.0, 0.41, 2.9] {
            assert!((sc.eval(t) - 1.5).abs() < 1e-14);
            assert!((si.eval(t) - t).abs() < 1e-13);
        }
        let cubic = KernelSpec::bspline(3).unwrap();
        let f = builtin("gaussian_bump", &Params::new()).unwrap();
        let s = generalized_sampling_apply(&f, 4.0, &cubic);
        let node = 0.25;
        let expect = f.eval(0.0) * 0.125 + f.eval(0.25) * 0.75 + f.eval(0.5) * 0.125;
        assert!((s.eval(node) - expect).abs() < 1e-14);
        assert!((s.eval(node) - f.eval(node)).abs() > 1e-3);
    }

    #[test]
    fn domain_mismatch() {
        let f = PointwiseFunction::constant(1.0);
        let q = QuadratureConfig::default();
        assert!(operator_error(&f, &OperatorFamily::bernstein(4), &Domain::line(), 2.0, &q).is_err());
        assert!(operator_error(&f, &OperatorFamily::shannon(4.0), &unit(), 2.0, &q).is_err());
        let short = OperatorFamily::Shannon { w: 4.0, trunc_terms: 10 };
        assert!(short.apply(&f, &Domain::line()).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::test_runner::Config::with_cases(24))]

        #[test]
        fn bernstein_is_stable(seed in proptest::collection::vec(-1.0f64..1.0, 6), n in 4usize..40, p in 1.0f64..4.0) {
            let coeffs = seed.clone();
            let f = PointwiseFunction::new("random", move |x: f64| {
                coeffs.iter().enumerate().map(|(i, c)| c * (3.0 * i as f64 * x).cos()).sum()
            });
            let nodes = crate::discrete::NodeSet::equispaced(0.0, 1.0, n).unwrap();
            let q = QuadratureConfig::default().with_cells(512);
            let lhs = operator_norm(&f, &OperatorFamily::bernstein(n), &unit(), p, &q).unwrap();
            let rhs = crate::discrete::discrete_seminorm(&f, &nodes, p).unwrap();
            proptest::prop_assert!(lhs <= rhs + 1e-9);
        }
    }
}
