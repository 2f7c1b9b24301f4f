//! Function representation, domains, quadrature and the built-in function corpus.
//!
//! A [`PointwiseFunction`] carries its exact pointwise values together with an
//! optional almost-everywhere representative. Sampling operators and discrete
//! seminorms read the pointwise values; every integral reads the a.e.
//! representative. This split is what lets the Dirichlet function have
//! `f(q) = 1` at every rational `q` while `‖f‖_p = 0`.

mod corpus;
mod norm;
mod quadrature;
mod rational;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub use corpus::{builtin, corpus_entries, params, sinc, CorpusEntry, FunctionSpec, Params};
pub use norm::{lp_norm, lp_norm_of, omega_p_majorant_check, MajorantVerdict};
pub use quadrature::{integrate, quadrature_nodes, QuadratureConfig, Rule, DEFAULT_JITTER};
pub use rational::{rational_approximation, RATIONAL_MAX_DENOMINATOR, RATIONAL_TOLERANCE};

/// Shared real-valued map.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Exact local-modulus oracle `(k, x, δ) ↦ ω_k(f, x; δ)`.
pub type OscillationOracle = Arc<dyn Fn(usize, f64, f64) -> f64 + Send + Sync>;

/// Half-width of the default computation window on the real line.
pub const DEFAULT_LINE_HALF_WIDTH: f64 = 64.0;

/// The set A on which functions live: the real line or a closed interval.
///
/// For the line, `lo..hi` is the effective computation window outside of which
/// functions are assumed to be numerically negligible.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    Line { lo: f64, hi: f64 },
    Interval { a: f64, b: f64 },
}

impl Domain {
    /// The real line with the default window `[-64, 64]`.
    pub fn line() -> Self {
        Domain::Line {
            lo: -DEFAULT_LINE_HALF_WIDTH,
            hi: DEFAULT_LINE_HALF_WIDTH,
        }
    }

    pub fn line_window(lo: f64, hi: f64) -> Result<Self> {
        let d = Domain::Line { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        let d = Domain::Interval { a, b };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bounds();
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return domain(format!("invalid domain bounds [{lo}, {hi}]"));
        }
        Ok(())
    }

    /// Window bounds for the line, endpoints for an interval.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Domain::Line { lo, hi } => (lo, hi),
            Domain::Interval { a, b } => (a, b),
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self, Domain::Line { .. })
    }

    pub fn length(&self) -> f64 {
        let (lo, hi) = self.bounds();
        hi - lo
    }

    /// Membership in A. Every real number belongs to the line.
    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Domain::Line { .. } => x.is_finite(),
            Domain::Interval { a, b } => x >= a && x <= b,
        }
    }

    /// Range over which integrals of a function with the given support hull are taken.
    /// Returns `None` when the intersection is empty.
    pub fn integration_range(&self, support: Option<(f64, f64)>) -> Option<(f64, f64)> {
        let (mut lo, mut hi) = self.bounds();
        if let Some((s0, s1)) = support {
            lo = lo.max(s0);
            hi = hi.min(s1);
        }
        (lo < hi).then_some((lo, hi))
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Domain::Line { lo, hi } => write!(f, "line[{lo},{hi}]"),
            Domain::Interval { a, b } => write!(f, "interval[{a},{b}]"),
        }
    }
}

/// Declared regularity class of a function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regularity {
    /// Bounded and at least piecewise continuous.
    Bounded,
    /// Only p-integrable; may be unbounded.
    Lp,
    /// Belongs to W^r_p with the given r (and is bounded).
    Sobolev(u32),
    /// Bounded but nowhere continuous; grid numerics are meaningless, oracles are used.
    Pathological,
}

impl Regularity {
    pub fn is_bounded(self) -> bool {
        !matches!(self, Regularity::Lp)
    }

    fn rank(self) -> u32 {
        match self {
            Regularity::Sobolev(_) => 0,
            Regularity::Bounded => 1,
            Regularity::Pathological => 2,
            Regularity::Lp => 3,
        }
    }

    /// The weaker of two classes, used for linear combinations.
    pub fn weakest(self, other: Regularity) -> Regularity {
        match (self, other) {
            (Regularity::Sobolev(a), Regularity::Sobolev(b)) => Regularity::Sobolev(a.min(b)),
            _ if self.rank() >= other.rank() => self,
            _ => other,
        }
    }
}

/// A function with genuine pointwise values.
///
/// Values are immutable after construction and every map is `Send + Sync`, so
/// the same function may be evaluated from many threads at once.
#[derive(Clone)]
pub struct PointwiseFunction {
    name: String,
    eval: RealFn,
    derivatives: Vec<RealFn>,
    ae_rep: Option<RealFn>,
    osc_oracle: Option<OscillationOracle>,
    regularity: Regularity,
    support: Option<(f64, f64)>,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for PointwiseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointwiseFunction")
            .field("name", &self.name)
            .field("derivatives", &self.derivatives.len())
            .field("ae_rep", &self.ae_rep.is_some())
            .field("osc_oracle", &self.osc_oracle.is_some())
            .field("regularity", &self.regularity)
            .field("support", &self.support)
            .field("breakpoints", &self.breakpoints.len())
            .finish()
    }
}

impl PointwiseFunction {
    pub fn new<F>(name: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            derivatives: Vec::new(),
            ae_rep: None,
            osc_oracle: None,
            regularity: Regularity::Bounded,
            support: None,
            breakpoints: Vec::new(),
        }
    }

    /// Constant function.
    pub fn constant(c: f64) -> Self {
        Self::new(format!("const({c})"), move |_| c)
            .with_derivatives(vec![Arc::new(|_| 0.0) as RealFn])
            .with_regularity(Regularity::Sobolev(u32::MAX))
    }

    /// Closed-form derivatives; `derivs[k - 1]` is the k-th derivative.
    pub fn with_derivatives(mut self, derivs: Vec<RealFn>) -> Self {
        self.derivatives = derivs;
        self
    }

    pub fn with_ae_rep<F>(mut self, rep: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.ae_rep = Some(Arc::new(rep));
        self
    }

    pub fn with_oscillation_oracle<F>(mut self, oracle: F) -> Self
    where
        F: Fn(usize, f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.osc_oracle = Some(Arc::new(oracle));
        self
    }

    pub fn with_regularity(mut self, regularity: Regularity) -> Self {
        self.regularity = regularity;
        self
    }

    /// Declares that the function vanishes (or is below 1e-20) outside `[lo, hi]`.
    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = Some((lo, hi));
        self
    }

    /// Points where the function or one of its low derivatives is singular or discontinuous.
    pub fn with_breakpoints(mut self, mut points: Vec<f64>) -> Self {
        points.retain(|x| x.is_finite());
        points.sort_by(f64::total_cmp);
        points.dedup();
        self.breakpoints = points;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Exact pointwise value.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// Value used inside integrals: the a.e. representative when one exists.
    #[inline]
    pub fn ae_value(&self, x: f64) -> f64 {
        match &self.ae_rep {
            Some(rep) => rep(x),
            None => (self.eval)(x),
        }
    }

    pub fn has_ae_rep(&self) -> bool {
        self.ae_rep.is_some()
    }

    /// Closed-form k-th derivative at x, when declared (`k = 0` is the function itself).
    pub fn derivative(&self, k: usize, x: f64) -> Option<f64> {
        if k == 0 {
            return Some(self.eval(x));
        }
        self.derivatives.get(k - 1).map(|d| d(x))
    }

    /// Highest derivative order with a closed form.
    pub fn derivative_order(&self) -> usize {
        self.derivatives.len()
    }

    /// The k-th derivative as a function of its own, when declared.
    pub fn derivative_function(&self, k: usize) -> Option<PointwiseFunction> {
        if k == 0 {
            return Some(self.clone());
        }
        let d = self.derivatives.get(k - 1)?.clone();
        let higher = self.derivatives[k..].to_vec();
        let mut g = PointwiseFunction {
            name: format!("{}^({k})", self.name),
            eval: d,
            derivatives: higher,
            ae_rep: None,
            osc_oracle: None,
            regularity: Regularity::Bounded,
            support: self.support,
            breakpoints: self.breakpoints.clone(),
        };
        if let Regularity::Sobolev(r) = self.regularity {
            g.regularity = Regularity::Sobolev(r.saturating_sub(k as u32));
        }
        Some(g)
    }

    /// Exact local modulus ω_k(f, x; δ), when an oracle exists.
    pub fn oscillation(&self, k: usize, x: f64, delta: f64) -> Option<f64> {
        self.osc_oracle.as_ref().map(|o| o(k, x, delta))
    }

    pub fn has_oscillation_oracle(&self) -> bool {
        self.osc_oracle.is_some()
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        self.support
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `Σ cᵢ fᵢ`. The a.e. representative of the result is `Σ cᵢ (fᵢ)_ae`, so
    /// pointwise and integral views stay consistent.
    pub fn linear_combination(terms: &[(f64, &PointwiseFunction)]) -> PointwiseFunction {
        let parts: Vec<(f64, PointwiseFunction)> =
            terms.iter().map(|(c, f)| (*c, (*f).clone())).collect();
        let name = parts
            .iter()
            .map(|(c, f)| format!("{c}*{}", f.name))
            .collect::<Vec<_>>()
            .join(" + ");

        let eval_parts = parts.clone();
        let mut out = PointwiseFunction::new(name, move |x| {
            eval_parts.iter().map(|(c, f)| c * f.eval(x)).sum()
        });

        if parts.iter().any(|(_, f)| f.ae_rep.is_some()) {
            let ae_parts = parts.clone();
            out.ae_rep = Some(Arc::new(move |x| {
                ae_parts.iter().map(|(c, f)| c * f.ae_value(x)).sum()
            }));
        }

        let order = parts
            .iter()
            .map(|(_, f)| f.derivatives.len())
            .min()
            .unwrap_or(0);
        out.derivatives = (1..=order)
            .map(|k| {
                let ds: Vec<(f64, RealFn)> = parts
                    .iter()
                    .map(|(c, f)| (*c, f.derivatives[k - 1].clone()))
                    .collect();
                Arc::new(move |x: f64| ds.iter().map(|(c, d)| c * d(x)).sum()) as RealFn
            })
            .collect();

        out.regularity = parts
            .iter()
            .map(|(_, f)| f.regularity)
            .reduce(Regularity::weakest)
            .unwrap_or(Regularity::Bounded);

        out.support = parts
            .iter()
            .try_fold(None::<(f64, f64)>, |acc, (_, f)| {
                let s = f.support?;
                Some(Some(match acc {
                    None => s,
                    Some((lo, hi)) => (lo.min(s.0), hi.max(s.1)),
                }))
            })
            .flatten();

        let mut bps: Vec<f64> = parts
            .iter()
            .flat_map(|(_, f)| f.breakpoints.iter().copied())
            .collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        out.breakpoints = bps;
        out
    }

    /// `self - other`, with a.e. representatives propagated.
    pub fn minus(&self, other: &PointwiseFunction) -> PointwiseFunction {
        PointwiseFunction::linear_combination(&[(1.0, self), (-1.0, other)])
            .renamed(format!("{} - {}", self.name, other.name))
    }

    pub fn scaled(&self, c: f64) -> PointwiseFunction {
        PointwiseFunction::linear_combination(&[(c, self)]).renamed(format!("{c}*{}", self.name))
    }
}

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
