//! Node sets, discrete ℓ_p seminorms, the semi-discrete modulus Ω̃_{r,s} and
//! a K-functional estimate over Steklov candidates.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::func::{lp_norm, Domain, PointwiseFunction, QuadratureConfig};
use crate::smoothness::{modulus_of_smoothness, ModulusRequest};
use crate::steklov::{steklov_average, steklov_derivative, SteklovSpec};

/// Largest node count accepted for a truncated line lattice.
pub const MAX_LINE_NODES: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeKind {
    /// The lattice `j/W` for `j_lo ≤ j ≤ j_hi`.
    UniformLine { w: f64, j_lo: i64, j_hi: i64 },
    /// `n + 1` ordered nodes of `[a, b]` with spacing at least `γ/n`.
    IntervalNodes { n: usize, a: f64, b: f64, gamma: f64 },
    /// An admissible partition with explicit weights Δ_j.
    Admissible,
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeSet {
    pub kind: NodeKind,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl NodeSet {
    /// `j/W` for every `j` with `j/W ∈ [lo, hi]`, each with weight `1/W`.
    pub fn uniform_line(w: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(w > 0.0 && w.is_finite()) {
            return domain(format!("lattice density W must be positive, got {w}"));
        }
        if !(lo < hi) {
            return domain(format!("empty lattice window [{lo}, {hi}]"));
        }
        let j_lo = (lo * w - 1e-9).ceil() as i64;
        let j_hi = (hi * w + 1e-9).floor() as i64;
        let count = (j_hi - j_lo + 1).max(0) as usize;
        if count > MAX_LINE_NODES {
            return Err(Error::Config(format!("{count} lattice nodes exceed the cap {MAX_LINE_NODES}")));
        }
        let points = (j_lo..=j_hi).map(|j| j as f64 / w).collect();
        Ok(Self {
            kind: NodeKind::UniformLine { w, j_lo, j_hi },
            points,
            weights: vec![1.0 / w; count],
        })
    }

    /// Lattice covering the window of a line domain.
    pub fn lattice_for(dom: &Domain, w: f64) -> Result<Self> {
        let (lo, hi) = dom.bounds();
        Self::uniform_line(w, lo, hi)
    }

    /// `a + k(b-a)/n`, `k = 0..=n`.
    pub fn equispaced(a: f64, b: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return domain("node count n must be ≥ 1");
        }
        let points: Vec<f64> = (0..=n).map(|k| a + k as f64 * (b - a) / n as f64).collect();
        Self::interval_nodes(a, b, points, (b - a).min(1.0))
    }

    /// Arbitrary ordered nodes `x_0 < … < x_n` of `[a, b]` with weights `(b-a)/n`.
    ///
    /// Consecutive nodes must be at least `γ/n` apart, and so must `x_n` and
    /// the wrapped node `(b - a) + x_1`.
    pub fn interval_nodes(a: f64, b: f64, points: Vec<f64>, gamma: f64) -> Result<Self> {
        if !(a < b) {
            return domain(format!("invalid interval [{a}, {b}]"));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return domain(format!("gamma must lie in (0, 1], got {gamma}"));
        }
        if points.len() < 2 {
            return domain("interval node sets need at least two nodes");
        }
        let n = points.len() - 1;
        let min_gap = gamma / n as f64 * (1.0 - 1e-12);
        if points.iter().any(|&x| x < a || x > b || !x.is_finite()) {
            return domain("interval nodes must lie in [a, b]");
        }
        if let Some(k) = points.windows(2).position(|w| w[1] - w[0] < min_gap) {
            return domain(format!(
                "nodes {k} and {} are closer than gamma/n = {}",
                k + 1,
                gamma / n as f64
            ));
        }
        let wrap = (b - a) + points[1] - points[n];
        if wrap < min_gap {
            return domain(format!("wrap-around spacing {wrap} is below gamma/n"));
        }
        Ok(Self {
            kind: NodeKind::IntervalNodes { n, a, b, gamma },
            weights: vec![(b - a) / n as f64; n + 1],
            points,
        })
    }

    /// A general partition `Σ = (x_j)` with weights `Δ_j`.
    pub fn admissible(points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() || points.is_empty() {
            return domain("admissible partition needs matching, non-empty points and weights");
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("admissible partition must be strictly increasing");
        }
        let inf = weights.iter().copied().fold(f64::INFINITY, f64::min);
        let sup = weights.iter().copied().fold(0.0, f64::max);
        if !(inf > 0.0 && sup.is_finite()) {
            return domain(format!("weights must satisfy 0 < inf = {inf} ≤ sup = {sup} < ∞"));
        }
        Ok(Self { kind: NodeKind::Admissible, points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `(Σ_j |f(x_j)|^p Δ_j)^{1/p}` from exact pointwise values.
pub fn discrete_seminorm(f: &PointwiseFunction, nodes: &NodeSet, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return domain(format!("p must be ≥ 1, got {p}"));
    }
    let support = f.support();
    let terms: Vec<f64> = nodes
        .points
        .par_iter()
        .zip(nodes.weights.par_iter())
        .map(|(&x, &w)| match support {
            Some((s0, s1)) if x < s0 || x > s1 => 0.0,
            _ => {
                let v = f.eval(x).abs();
                if p.is_infinite() { v } else { w * v.powf(p) }
            }
        })
        .collect();
    if p.is_infinite() {
        return Ok(terms.into_iter().fold(0.0, f64::max));
    }
    Ok(terms.iter().sum::<f64>().powf(1.0 / p))
}

/// The two scales entering Ω̃: the Steklov step and the modulus step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OmegaScale {
    pub steklov_delta: f64,
    pub modulus_step: f64,
}

impl OmegaScale {
    /// Line lattice Σ_W: both steps `1/W`.
    pub fn line(w: f64) -> Self {
        Self { steklov_delta: 1.0 / w, modulus_step: 1.0 / w }
    }

    /// Interval nodes X_n: Steklov step `γ/n`, modulus step `1/n`.
    pub fn interval(n: f64, gamma: f64) -> Self {
        Self { steklov_delta: gamma / n, modulus_step: 1.0 / n }
    }

    /// Rescaled variant with `φ(W)` in place of `W`.
    pub fn custom(steklov_delta: f64, modulus_step: f64) -> Self {
        Self { steklov_delta, modulus_step }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SemiDiscrete {
    pub total: f64,
    pub discrete: f64,
    pub omega: f64,
}

/// Ω̃_{r,s} = ‖f̃_{δ,r} − f‖_{ℓ_p(nodes)} + ω_s(f, step)_p.
#[allow(clippy::too_many_arguments)]
pub fn semi_discrete_modulus(
    f: &PointwiseFunction,
    dom: &Domain,
    nodes: &NodeSet,
    r: usize,
    s: usize,
    p: f64,
    scale: OmegaScale,
    q: &QuadratureConfig,
) -> Result<SemiDiscrete> {
    if s > r {
        return domain(format!("s = {s} exceeds r = {r}"));
    }
    let spec = SteklovSpec::new(scale.steklov_delta, r);
    let avg = steklov_average(f, dom, &spec)?;
    let diff = avg.minus(f);
    let discrete = discrete_seminorm(&diff, nodes, p)?;
    let omega = modulus_of_smoothness(f, dom, &ModulusRequest::new(s, scale.modulus_step, p), q)?;
    Ok(SemiDiscrete { total: discrete + omega, discrete, omega })
}

/// Candidate Steklov steps `2^k · δ`, `k = -3..=3`, dropping inadmissible ones.
pub fn default_candidates(dom: &Domain, delta: f64, s: usize) -> Vec<f64> {
    (-3..=3)
        .map(|k| delta * 2f64.powi(k))
        .filter(|d| SteklovSpec::new(*d, s.max(1)).validate(dom).is_ok())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KEstimate {
    pub value: f64,
    pub argmin_delta: f64,
}

/// Upper estimate of K_s over the family `g = f̃_{δ,s}`, δ in `candidates`:
/// `min ‖f−g‖_{ℓ_p} + ‖f−g‖_p + step^s ‖g^{(s)}‖_p`.
#[allow(clippy::too_many_arguments)]
pub fn k_functional_estimate(
    f: &PointwiseFunction,
    dom: &Domain,
    nodes: &NodeSet,
    s: usize,
    p: f64,
    scale: OmegaScale,
    candidates: &[f64],
    q: &QuadratureConfig,
) -> Result<KEstimate> {
    if candidates.is_empty() {
        return Err(Error::Config("K-functional needs at least one candidate delta".into()));
    }
    if s == 0 {
        return domain("K-functional order must be ≥ 1");
    }
    let penalty = scale.modulus_step.powi(s as i32);
    let mut best = KEstimate { value: f64::INFINITY, argmin_delta: f64::NAN };
    for &delta in candidates {
        let spec = SteklovSpec::new(delta, s);
        let g = steklov_average(f, dom, &spec)?;
        let diff = f.minus(&g);
        let discrete = discrete_seminorm(&diff, nodes, p)?;
        let continuous = lp_norm(&diff, dom, p, None, q)?;
        let dg = steklov_derivative(f, dom, &spec, s)?;
        let smooth = lp_norm(&dg, dom, p, None, q)?;
        let value = discrete + continuous + penalty * smooth;
        if value < best.value {
            best = KEstimate { value, argmin_delta: delta };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{builtin, Params};

    fn q() -> QuadratureConfig {
        QuadratureConfig::default().with_cells(512)
    }

    #[test]
    fn lattice_nodes_are_exact() {
        let nodes = NodeSet::uniform_line(8.0, -1.0, 1.0).unwrap();
        assert_eq!(nodes.len(), 17);
        assert_eq!(nodes.points[0], -1.0);
        assert_eq!(nodes.points[3], -5.0 / 8.0);
        assert!(nodes.weights.iter().all(|&w| w == 0.125));
    }

    #[test]
    fn gamma_spacing_is_enforced() {
        assert!(NodeSet::equispaced(0.0, 1.0, 16).is_ok());
        let bad = vec![0.0, 0.1, 0.11, 0.6, 1.0];
        assert!(NodeSet::interval_nodes(0.0, 1.0, bad, 0.5).is_err());
        // Spacing is fine but x_n and the wrapped x_1 collide.
        let wrap = vec![0.0, 0.05, 0.4, 0.7, 1.0];
        assert!(NodeSet::interval_nodes(0.0, 1.0, wrap.clone(), 0.1).is_ok());
        assert!(NodeSet::interval_nodes(0.0, 1.0, wrap, 0.5).is_err());
        assert!(NodeSet::admissible(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn seminorm_examples() {
        let zero = PointwiseFunction::constant(0.0);
        let nodes = NodeSet::equispaced(0.0, 1.0, 16).unwrap();
        assert_eq!(discrete_seminorm(&zero, &nodes, 2.0).unwrap(), 0.0);

        let d = builtin("dirichlet", &Params::new()).unwrap();
        let nodes = NodeSet::equispaced(0.0, 2.0, 10).unwrap();
        let v = discrete_seminorm(&d, &nodes, 2.0).unwrap();
        assert!((v - (2.0 * 11.0 / 10.0f64).sqrt()).abs() < 1e-14);

        let e = builtin("even_denominator", &Params::new()).unwrap();
        for n in [8usize, 32] {
            let nodes = NodeSet::equispaced(0.0, 1.0, 2 * n + 1).unwrap();
            assert_eq!(discrete_seminorm(&e, &nodes, 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn dirichlet_semi_discrete_modulus() {
        let d = builtin("dirichlet", &Params::new()).unwrap();
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let n = 16;
        let nodes = NodeSet::equispaced(0.0, 1.0, n).unwrap();
        let v = semi_discrete_modulus(&d, &dom, &nodes, 1, 1, 2.0, OmegaScale::interval(n as f64, 1.0), &q())
            .unwrap();
        assert_eq!(v.omega, 0.0);
        assert!((v.total - (17.0f64 / 16.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn semi_discrete_argument_checks() {
        let c = PointwiseFunction::constant(1.0);
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let nodes = NodeSet::equispaced(0.0, 1.0, 4).unwrap();
        assert!(semi_discrete_modulus(&c, &dom, &nodes, 1, 2, 2.0, OmegaScale::interval(4.0, 1.0), &q()).is_err());
        assert!(semi_discrete_modulus(&c, &dom, &nodes, 3, 1, 2.0, OmegaScale::custom(0.5, 0.25), &q()).is_err());
    }

    #[test]
    fn k_functional_examples() {
        let c = PointwiseFunction::constant(2.0);
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let nodes = NodeSet::equispaced(0.0, 1.0, 16).unwrap();
        let scale = OmegaScale::interval(16.0, 1.0);
        let cands = default_candidates(&dom, scale.steklov_delta, 1);
        let k = k_functional_estimate(&c, &dom, &nodes, 1, 2.0, scale, &cands, &q()).unwrap();
        assert!(k.value < 1e-9);
        assert!(k_functional_estimate(&c, &dom, &nodes, 1, 2.0, scale, &[], &q()).is_err());

        let d = builtin("dirichlet", &Params::new()).unwrap();
        let k = k_functional_estimate(&d, &dom, &nodes, 1, 2.0, scale, &cands, &q()).unwrap();
        assert!((k.value - (17.0f64 / 16.0).sqrt()).abs() < 1e-9);
    }

    proptest::proptest! {
        #![proptest_config(proptest::test_runner::Config::with_cases(16))]

        #[test]
        fn subadditive(c1 in -1.0f64..1.0, c2 in -1.0f64..1.0, w in 0.4f64..1.5, wl in 8.0f64..32.0) {
            let f = builtin("gaussian_bump", &crate::func::params(&[("center", c1.into()), ("width", w.into())])).unwrap();
            let g = builtin("sobolev_sample", &crate::func::params(&[("center", c2.into())])).unwrap();
            let dom = Domain::line();
            let nodes = NodeSet::uniform_line(wl, -12.0, 12.0).unwrap();
            let scale = OmegaScale::line(wl);
            let q = QuadratureConfig::default().with_cells(256);
            let sum = PointwiseFunction::linear_combination(&[(1.0, &f), (1.0, &g)]);
            let a = semi_discrete_modulus(&f, &dom, &nodes, 2, 1, 2.0, scale, &q).unwrap();
            let b = semi_discrete_modulus(&g, &dom, &nodes, 2, 1, 2.0, scale, &q).unwrap();
            let ab = semi_discrete_modulus(&sum, &dom, &nodes, 2, 1, 2.0, scale, &q).unwrap();
            proptest::prop_assert!(ab.total <= a.total + b.total + 1e-9);
        }
    }
}
