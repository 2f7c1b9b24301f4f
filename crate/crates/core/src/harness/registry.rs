//! Named theorem checks, their frozen corpus and calibration.
//!
//! Each check runs a fixed configuration and returns one or more
//! [`InequalityReport`]s. Checks whose constants are empirical read them from
//! [`Constants`]; `calibrate` reruns everything without constants and records
//! the observed extremes.

use std::time::Instant;

use serde_json::{json, Value};

use super::checks::{
    check_lower_estimate, check_upper_estimate, dyadic_sum_bound, realization_check, series_bound_check,
    CheckSetting,
};
use super::constants::Constants;
use super::report::{Bound, InequalityReport, Row, Verdict};
use crate::discrete::{
    default_candidates, discrete_seminorm, k_functional_estimate, semi_discrete_modulus, NodeSet, OmegaScale,
};
use crate::error::{Error, Result};
use crate::func::{builtin, lp_norm, params, Domain, PointwiseFunction, QuadratureConfig};
use crate::operators::{m0_moment, operator_error, operator_norm, KernelSpec, OperatorFamily};
use crate::smoothness::{local_modulus, modulus_of_smoothness, modulus_ratio, tau_modulus, ModulusRequest};
use crate::steklov::{steklov_average, steklov_derivative, SteklovSpec};

/// Result of one named check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub id: String,
    pub description: String,
    pub reports: Vec<InequalityReport>,
    pub seconds: f64,
}

impl CheckOutcome {
    /// Violated if any report is; degenerate only if every report is.
    pub fn verdict(&self) -> Verdict {
        let vs: Vec<Verdict> = self.reports.iter().map(|r| r.verdict).collect();
        if vs.contains(&Verdict::Violated) {
            Verdict::Violated
        } else if vs.iter().all(|v| *v == Verdict::Degenerate) {
            Verdict::Degenerate
        } else {
            Verdict::HoldsWithConstant
        }
    }
}

type CheckFn = fn(&Constants) -> Result<Vec<InequalityReport>>;

struct Entry {
    id: &'static str,
    description: &'static str,
    run: CheckFn,
}

const REGISTRY: &[Entry] = &[
    Entry { id: "moduli.order_reduction", description: "ω_r ≤ 2^{r−k} ω_k", run: moduli_order_reduction },
    Entry { id: "moduli.derivative_bound", description: "ω_r(f,δ)_p ≤ δ^r ‖f^(r)‖_p", run: moduli_derivative_bound },
    Entry { id: "moduli.omega_le_tau", description: "ω_k(f,δ)_p ≤ τ_k(f,δ)_p", run: moduli_omega_le_tau },
    Entry { id: "moduli.tau_le_sup", description: "τ_k(f,δ)_p ≤ (b−a)^{1/p} ω_k(f,δ)_∞", run: moduli_tau_le_sup },
    Entry { id: "moduli.ratio", description: "ω_s/ω_{s+1} tables", run: moduli_ratio },
    Entry { id: "steklov.approximation", description: "‖f̃_{δ,r} − f‖_p ≤ c1 ω_r(f,δ)_p", run: steklov_approximation },
    Entry { id: "steklov.derivative", description: "δ^s ‖f̃^(s)_{δ,r}‖_p ≤ c2 ω_s(f,δ)_p", run: steklov_derivative_check },
    Entry { id: "steklov.pointwise", description: "|f(x) − f̃_{δ,r}(x)| ≤ ω_r(f,x;2δ)", run: steklov_pointwise },
    Entry { id: "steklov.discrete_tau", description: "‖f̃_{δ,r} − f‖_{ℓp(X_n)} ≤ c3 τ_r(f, δ + (b−a)/(rn))_p", run: steklov_discrete_tau },
    Entry { id: "discrete.seminorm_bound", description: "‖f‖_ℓp ≤ ‖f‖_p + spacing·‖f′‖_p", run: discrete_seminorm_bound },
    Entry { id: "kfunctional.equivalence", description: "K_s estimate / Ω̃_{s,s} in a fixed band", run: kfunctional_equivalence },
    Entry { id: "kfunctional.sharpness", description: "Ω̃_{s,s}(f,1/W) ≤ C τ_s(f,1/W)_p", run: kfunctional_sharpness },
    Entry { id: "bernstein.stability", description: "‖B_n f‖_p ≤ ‖f‖_{ℓp(X_n)}", run: bernstein_stability },
    Entry { id: "bernstein.sobolev_rate", description: "n ‖f − B_n f‖_p ≤ K3 ‖f″‖_p", run: bernstein_sobolev_rate },
    Entry { id: "bernstein.upper", description: "‖f − B_n f‖_p ≤ C1 Ω̃_{2,2}(f, 1/√n, X_n)_p", run: bernstein_upper },
    Entry { id: "bernstein.upper_affine", description: "upper estimate for affine f", run: bernstein_upper_affine },
    Entry { id: "bernstein.upper_even_denominator", description: "upper estimate for the even-denominator indicator, odd n", run: bernstein_upper_even_denominator },
    Entry { id: "bernstein.realization", description: "‖f − B_n f‖_p + n^{-1}‖(B_n f)″‖_p ≍ Ω̃_{2,2}", run: bernstein_realization },
    Entry { id: "bernstein.realization_affine", description: "realization for affine f", run: bernstein_realization_affine },
    Entry { id: "bernstein.lower_constant", description: "conditional lower estimate for constant f", run: bernstein_lower_constant },
    Entry { id: "sampling.stability", description: "‖S_W^φ f‖_p ≤ m0^{1−1/p} ‖φ‖_1^{1/p} ‖f‖_{ℓp(Σ_W)}", run: sampling_stability },
    Entry { id: "sampling.jackson", description: "‖S_W^φ f − f‖_p ≤ 2 m0 T² W^{-2} ‖f″‖_p", run: sampling_jackson },
    Entry { id: "sampling.upper", description: "‖f − S_W^φ f‖_p ≤ C Ω̃_{2,2}(f, 1/W, Σ_W)_p", run: sampling_upper },
    Entry { id: "sampling.realization", description: "realization with measured K5", run: sampling_realization },
    Entry { id: "shannon.interpolation", description: "S_W f(j/W) = f(j/W)", run: shannon_interpolation },
    Entry { id: "shannon.upper", description: "‖f − S_W f‖_2 ≤ C Ω̃_{2,2}(f, 1/W, Σ_W)_2", run: shannon_upper },
    Entry { id: "shannon.dyadic", description: "Ω̃ against the dyadic error sum, with measured K4", run: shannon_dyadic },
    Entry { id: "shannon.series", description: "Ω̃ against the truncated derivative series", run: shannon_series },
    Entry { id: "shannon.lower", description: "conditional lower estimate, report only", run: shannon_lower },
];

pub fn check_ids() -> Vec<&'static str> {
    REGISTRY.iter().map(|e| e.id).collect()
}

pub fn verify(id: &str, constants: &Constants) -> Result<CheckOutcome> {
    let entry = REGISTRY.iter().find(|e| e.id == id).ok_or_else(|| {
        Error::Config(format!("unknown check `{id}`; known checks: {}", check_ids().join(", ")))
    })?;
    let start = Instant::now();
    let reports = (entry.run)(constants)?;
    Ok(CheckOutcome {
        id: entry.id.to_string(),
        description: entry.description.to_string(),
        reports,
        seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn verify_all(constants: &Constants) -> Result<Vec<CheckOutcome>> {
    REGISTRY.iter().map(|e| verify(e.id, constants)).collect()
}

/// Runs every check with no frozen constants and records the observed
/// extremes as the new regression constants.
pub fn calibrate() -> Result<(Constants, Vec<CheckOutcome>)> {
    let outcomes = verify_all(&Constants::empty())?;
    let mut constants = Constants::empty();
    for o in &outcomes {
        for r in &o.reports {
            // Reports sharing a key keep the widest bound seen.
            for (k, v) in r.calibration() {
                let merged = match constants.get(&k) {
                    Some(old) if k.ends_with(".lo") => old.min(v),
                    Some(old) => old.max(v),
                    None => v,
                };
                constants.insert(k, merged);
            }
        }
    }
    Ok((constants, outcomes))
}

// ---------------------------------------------------------------------------
// Corpus

fn func(id: &str, pairs: &[(&str, Value)]) -> Result<PointwiseFunction> {
    builtin(id, &params(pairs))
}

fn on(f: PointwiseFunction, dom: Domain) -> (PointwiseFunction, Domain) {
    let name = format!("{} on {dom}", f.name());
    (f.renamed(name), dom)
}

fn unit() -> Domain {
    Domain::Interval { a: 0.0, b: 1.0 }
}

fn interval(a: f64, b: f64) -> Domain {
    Domain::Interval { a, b }
}

/// Members of the moduli corpus.
fn standard_corpus() -> Result<Vec<(PointwiseFunction, Domain)>> {
    Ok(vec![
        on(func("dirichlet", &[])?, unit()),
        on(func("even_denominator", &[])?, unit()),
        on(func("power_singularity", &[("alpha", json!(0.25))])?, Domain::line()),
        on(func("bspline", &[("order", json!(3))])?, Domain::line()),
        on(func("gaussian_bump", &[])?, Domain::line()),
        on(func("poly", &[("coeffs", json!([1.0, -1.0, 0.5, 0.25]))])?, interval(-1.0, 1.0)),
        on(func("sinc_packet", &[])?, Domain::line()),
        on(func("sobolev_sample", &[("r", json!(3))])?, interval(-2.0, 2.0)),
        on(func("gaussian_bump", &[])?, interval(-1.0, 2.0)),
    ])
}

/// Smooth or mildly singular members used by the Steklov checks.
fn steklov_corpus() -> Result<Vec<(PointwiseFunction, Domain)>> {
    Ok(vec![
        on(func("gaussian_bump", &[])?, Domain::line()),
        on(func("bspline", &[("order", json!(3))])?, Domain::line()),
        on(func("power_singularity", &[("alpha", json!(0.25))])?, Domain::line()),
        on(func("poly", &[("coeffs", json!([1.0, -1.0, 0.5, 0.25]))])?, interval(-1.0, 1.0)),
        on(func("sobolev_sample", &[("r", json!(3))])?, interval(-2.0, 2.0)),
    ])
}

/// Functions on [0, 1] for the Bernstein checks.
fn bernstein_corpus() -> Result<Vec<PointwiseFunction>> {
    Ok(vec![
        func("poly", &[("coeffs", json!([0.0, 0.0, 1.0]))])?,
        func("gaussian_bump", &[("center", json!(0.5)), ("width", json!(0.2))])?,
        func("sobolev_sample", &[("r", json!(2)), ("center", json!(0.5)), ("half_width", json!(0.3))])?,
    ])
}

/// Functions on the line for the sampling operators.
fn sampling_corpus() -> Result<Vec<PointwiseFunction>> {
    Ok(vec![
        func("gaussian_bump", &[])?,
        func("bspline", &[("order", json!(4))])?,
        func("sobolev_sample", &[("r", json!(2))])?,
    ])
}

/// Shannon checks work on a narrower window.
fn shannon_domain() -> Domain {
    Domain::Line { lo: -16.0, hi: 16.0 }
}

fn shannon_corpus() -> Result<Vec<PointwiseFunction>> {
    Ok(vec![
        func("bspline", &[("order", json!(4))])?,
        func("sobolev_sample", &[("r", json!(3))])?,
        func("gaussian_bump", &[("width", json!(0.5))])?,
    ])
}

fn quad() -> QuadratureConfig {
    QuadratureConfig::default().with_cells(512)
}

const DELTAS: [f64; 2] = [0.25, 0.0625];
const P_VALUES: [f64; 2] = [1.0, 2.0];
const N_GRID: [f64; 5] = [16.0, 32.0, 64.0, 128.0, 256.0];
const W_GRID: [f64; 5] = [8.0, 16.0, 32.0, 64.0, 128.0];

fn modulus(f: &PointwiseFunction, dom: &Domain, r: usize, delta: f64, p: f64, q: &QuadratureConfig) -> Result<f64> {
    modulus_of_smoothness(f, dom, &ModulusRequest::new(r, delta, p), q)
}

fn plain_row(f: &PointwiseFunction, scale: f64, p: f64, r: usize, s: usize, lhs: f64, rhs: f64) -> Row {
    Row::new(f.name(), "-", scale, p, r, s, lhs, rhs)
}

// ---------------------------------------------------------------------------
// Moduli

fn moduli_order_reduction(_: &Constants) -> Result<Vec<InequalityReport>> {
    let q = quad();
    let mut rows = Vec::new();
    for (f, dom) in standard_corpus()? {
        for &p in &P_VALUES {
            for &delta in &DELTAS {
                let w: Vec<f64> = (1..=3).map(|r| modulus(&f, &dom, r, delta, p, &q)).collect::<Result<_>>()?;
                for r in 2..=3 {
                    for k in 1..r {
                        let rhs = 2f64.powi((r - k) as i32) * w[k - 1];
                        rows.push(plain_row(&f, delta, p, r, k, w[r - 1], rhs));
                    }
                }
            }
        }
    }
    Ok(vec![InequalityReport::new("order_reduction", "ω_r against 2^{r−k} ω_k", rows, Bound::literal())])
}

fn moduli_derivative_bound(_: &Constants) -> Result<Vec<InequalityReport>> {
    let q = quad();
    let mut rows = Vec::new();
    for (f, dom) in standard_corpus()? {
        for r in 1..=f.derivative_order().min(2) {
            let d = f.derivative_function(r).expect("derivative within order");
            for &p in &P_VALUES {
                let norm = lp_norm(&d, &dom, p, None, &q)?;
                for &delta in &DELTAS {
                    let w = modulus(&f, &dom, r, delta, p, &q)?;
                    rows.push(plain_row(&f, delta, p, r, r, w, delta.powi(r as i32) * norm));
                }
            }
        }
    }
    Ok(vec![InequalityReport::new("derivative_bound", "ω_r against δ^r ‖f^(r)‖_p", rows, Bound::literal())])
}

/// τ is available for bounded functions and for those with an oscillation oracle.
fn has_tau(f: &PointwiseFunction) -> bool {
    f.regularity().is_bounded() || f.has_oscillation_oracle()
}

fn moduli_omega_le_tau(_: &Constants) -> Result<Vec<InequalityReport>> {
    let q = quad();
    let mut rows = Vec::new();
    for (f, dom) in standard_corpus()?.into_iter().filter(|(f, _)| has_tau(f)) {
        for &p in &P_VALUES {
            for &delta in &DELTAS {
                for k in 1..=2 {
                    let req = ModulusRequest::new(k, delta, p);
                    let w = modulus_of_smoothness(&f, &dom, &req, &q)?;
                    let t = tau_modulus(&f, &dom, &req, &q)?;
                    rows.push(plain_row(&f, delta, p, k, k, w, t));
                }
            }
        }
    }
    Ok(vec![InequalityReport::new("omega_le_tau", "ω_k against τ_k", rows, Bound::literal())])
}

fn moduli_tau_le_sup(_: &Constants) -> Result<Vec<InequalityReport>> {
    let q = quad();
    let mut rows = Vec::new();
    for (f, dom) in standard_corpus()?.into_iter().filter(|(f, d)| has_tau(f) && !d.is_line()) {
        for &delta in &DELTAS {
            for k in 1..=2 {
                let sup = modulus(&f, &dom, k, delta, f64::INFINITY, &q)?;
                for &p in &P_VALUES {
                    let t = tau_modulus(&f, &dom, &ModulusRequest::new(k, delta, p), &q)?;
                    rows.push(plain_row(&f, delta, p, k, k, t, dom.length().powf(1.0 / p) * sup));
                }
            }
        }
    }
    Ok(vec![InequalityReport::new("tau_le_sup", "τ_k against (b−a)^{1/p} ω_k(·)_∞", rows, Bound::literal())])
}

fn moduli_ratio(_: &Constants) -> Result<Vec<InequalityReport>> {
    let q = quad();
    let deltas: Vec<f64> = (2..=6).map(|k| 2f64.powi(-k)).collect();
    let members = [
        on(func("gaussian_bump", &[])?, Domain::line()),
        on(func("power_singularity", &[("alpha", json!(0.25))])?, Domain::line()),
    ];
    let mut reports = Vec::new();
    for (f, dom) in &members {
        let rep = modulus_ratio(f, dom, 1, &deltas, 2.0, &q)?;
        let rows = rep.rows.iter().map(|r| plain_row(f, r.delta, 2.0, 2, 1, r.omega_s, r.omega_s1)).collect();
        let trend = rep.trend.as_ref().map_or("none".to_string(), |t| format!("{:.3}", t.fitted_order));
        reports.push(
            InequalityReport::new("modulus_ratio", "ω_1 against ω_2", rows, Bound::ReportOnly)
                .with_note(format!("{}: bounded = {}, trend order = {trend}", f.name(), rep.bounded())),
        );
    }
    Ok(reports)
}

// ---------------------------------------------------------------------------
// Steklov

/// δ = 2^{-2} … 2^{-8}.
pub(crate) fn steklov_deltas() -> Vec<f64> {
    (2..=8).map(|k| 2f64.powi(-k)).collect()
}

fn steklov_approximation(c: &Constants) -> Result<Vec<InequalityReport>> {
    let q = quad();
    let mut rows = Vec::new();
    for (f, dom) in steklov_corpus()? {
        for r in 1..=2 {
            for delta in steklov_deltas() {
                let avg = steklov_average(&f, &dom, &SteklovSpec::new(delta, r))?;
                let err = lp_norm(&avg.minus(&f), &dom, 2.0, None, &q)?;
                let w = modulus(&f, &dom, r, delta, 2.0, &q)?;
                rows.push(plain_row(&f, delta, 2.0, r, r, err, w));
            }
        }
    }
    Ok(vec![InequalityReport::new(
        "steklov_approximation",
        "‖f̃_{δ,r} − f‖_2 against ω_r(f,δ)_2",
        rows,
        Bound::frozen("steklov.c1", c),
    )])
}

fn steklov_derivative_check(c: &Constants) -> Result<Vec<InequalityReport>> {
    let q = quad();
    let mut rows = Vec::new();
    for (f, dom) in steklov_corpus()? {
        for (r, s) in [(1, 1), (2, 1), (2, 2)] {
            for delta in steklov_deltas() {
                let d = steklov_derivative(&f, &dom, &SteklovSpec::new(delta, r), s)?;
                let lhs = delta.powi(s as i32) * lp_norm(&d, &dom, 2.0, None, &q)?;
                let w = modulus(&f, &dom, s, delta, 2.0, &q)?;
                rows.push(plain_row(&f, delta, 2.0, r, s, lhs, w));
            }
        }
    }
    Ok(vec![InequalityReport::new(
        "steklov_derivative",
        "δ^s ‖f̃^(s)_{δ,r}‖_2 against ω_s(f,δ)_2",
        rows,
        Bound::frozen("steklov.c2", c),
    )])
}

fn steklov_pointwise(_: &Constants) -> Result<Vec<InequalityReport>> {
    let members = vec![
        on(func("gaussian_bump", &[])?, Domain::line()),
        on(func("bspline", &[("order", json!(3))])?, Domain::line()),
        on(func("sinc_packet", &[])?, Domain::line()),
        on(func("poly", &[("coeffs", json!([1.0, -1.0, 0.5, 0.25]))])?, interval(-1.0, 1.0)),
        on(func("sobolev_sample", &[("r", json!(3))])?, interval(-2.0, 2.0)),
    ];
    let mut rows = Vec::new();
    for (f, dom) in members {
        let (lo, hi) = match dom {
            Domain::Line { .. } => (-3.0, 3.0),
            Domain::Interval { a, b } => (a, b),
        };
        for r in 1..=2 {
            for &delta in &DELTAS {
                let avg = steklov_average(&f, &dom, &SteklovSpec::new(delta, r))?;
                for i in 0..=40 {
                    let x = lo + (hi - lo) * i as f64 / 40.0;
                    let lhs = (f.eval(x) - avg.eval(x)).abs();
                    let rhs = local_modulus(&f, &dom, r, x, 2.0 * delta, 129)?;
                    rows.push(plain_row(&f, delta, f64::INFINITY, r, r, lhs, rhs).with_aux("x", x));
                }
            }
        }
    }
    Ok(vec![InequalityReport::new(
        "steklov_pointwise",
        "|f(x) − f̃_{δ,r}(x)| against ω_r(f,x;2δ)",
        rows,
        Bound::literal(),
    )])
}

fn steklov_discrete_tau(c: &Constants) -> Result<Vec<InequalityReport>> {
    let q = quad();
    let members = vec![
        on(func("dirichlet", &[])?, unit()),
        on(func("even_denominator", &[])?, unit()),
        on(func("poly", &[("coeffs", json!([1.0, -1.0, 0.5, 0.25]))])?, interval(-1.0, 1.0)),
        on(func("sobolev_sample", &[("r", json!(3))])?, interval(-2.0, 2.0)),
        on(func("gaussian_bump", &[])?, interval(-1.0, 2.0)),
    ];
    let mut rows = Vec::new();
    for (f, dom) in members {
        let (a, b) = dom.bounds();
        let gamma = (b - a).min(1.0);
        for r in 1..=2 {
            for n in [16usize, 32, 64, 128] {
                let nodes = NodeSet::equispaced(a, b, n)?;
                let delta = gamma / n as f64;
                let avg = steklov_average(&f, &dom, &SteklovSpec::new(delta, r))?;
                let lhs = discrete_seminorm(&avg.minus(&f), &nodes, 2.0)?;
                let step = delta + (b - a) / (r * n) as f64;
                let t = tau_modulus(&f, &dom, &ModulusRequest::new(r, step, 2.0), &q)?;
                rows.push(plain_row(&f, n as f64, 2.0, r, r, lhs, t));
            }
        }
    }
    Ok(vec![InequalityReport::new(
        "steklov_discrete_tau",
        "‖f̃_{δ,r} − f‖_{ℓ2(X_n)} against τ_r(f, δ + (b−a)/(rn))_2",
        rows,
        Bound::frozen("steklov.c3", c),
    )])
}

// ---------------------------------------------------------------------------
// Discrete seminorms and K-functionals

fn discrete_seminorm_bound(_: &Constants) -> Result<Vec<InequalityReport>> {
    let q = quad();
    let mut line_rows = Vec::new();
    let line = Domain::line();
    let members = [
        func("gaussian_bump", &[])?,
        func("bspline", &[("order", json!(3))])?,
        func("sobolev_sample", &[("r", json!(2))])?,
    ];
    for f in &members {
        let d = f.derivative_function(1).expect("corpus member is differentiable");
        for &p in &P_VALUES {
            let norm = lp_norm(f, &line, p, None, &q)?;
            let dnorm = lp_norm(&d, &line, p, None, &q)?;
            for w in [1.0, 2.0, 4.0, 8.0, 16.0] {
                let lhs = discrete_seminorm(f, &NodeSet::lattice_for(&line, w)?, p)?;
                line_rows.push(plain_row(f, w, p, 0, 1, lhs, norm + dnorm / w));
            }
        }
    }
    let mut interval_rows = Vec::new();
    let dom = interval(-1.0, 2.0);
    let members = [
        func("gaussian_bump", &[])?,
        func("poly", &[("coeffs", json!([1.0, -1.0, 0.5, 0.25]))])?,
        func("sobolev_sample", &[("r", json!(2))])?,
    ];
    for f in &members {
        let d = f.derivative_function(1).expect("corpus member is differentiable");
        for &p in &P_VALUES {
            let norm = lp_norm(f, &dom, p, None, &q)?;
            let dnorm = lp_norm(&d, &dom, p, None, &q)?;
            for n in [4usize, 16, 64] {
                let h = 3.0 / n as f64;
                let points = (0..n).map(|k| -1.0 + (k as f64 + 0.5) * h).collect();
                let nodes = NodeSet::admissible(points, vec![h; n])?;
                let lhs = discrete_seminorm(f, &nodes, p)?;
                interval_rows.push(plain_row(f, n as f64, p, 0, 1, lhs, norm + h * dnorm));
            }
        }
    }
    Ok(vec![
        InequalityReport::new("seminorm_bound_line", "‖f‖_{ℓp(Σ_W)} against ‖f‖_p + W^{-1}‖f′‖_p", line_rows, Bound::literal()),
        InequalityReport::new(
            "seminorm_bound_interval",
            "‖f‖_{ℓp(X_n)} against ‖f‖_p + ((b−a)/n)‖f′‖_p on cell midpoints",
            interval_rows,
            Bound::literal(),
        ),
    ])
}

/// Node set and Ω̃ scale for a line lattice at density `w`, or `n = w`
/// equispaced nodes on an interval.
fn nodes_at(dom: &Domain, w: f64) -> Result<(NodeSet, OmegaScale)> {
    match *dom {
        Domain::Line { .. } => Ok((NodeSet::lattice_for(dom, w)?, OmegaScale::line(w))),
        Domain::Interval { a, b } => {
            let n = w.round() as usize;
            Ok((NodeSet::equispaced(a, b, n)?, OmegaScale::interval(n as f64, (b - a).min(1.0))))
        }
    }
}

fn kfunctional_equivalence(c: &Constants) -> Result<Vec<InequalityReport>> {
    let q = quad();
    let members = vec![
        on(func("gaussian_bump", &[])?, Domain::line()),
        on(func("power_singularity", &[("alpha", json!(0.25))])?, Domain::line()),
        on(func("dirichlet", &[])?, unit()),
        on(func("sobolev_sample", &[("r", json!(3))])?, interval(-2.0, 2.0)),
    ];
    let mut rows = Vec::new();
    for (f, dom) in members {
        for s in 1..=2 {
            for &w in &W_GRID {
                let (nodes, scale) = nodes_at(&dom, w)?;
                let om = semi_discrete_modulus(&f, &dom, &nodes, s, s, 2.0, scale, &q)?;
                let cands = default_candidates(&dom, scale.steklov_delta, s);
                let k = k_functional_estimate(&f, &dom, &nodes, s, 2.0, scale, &cands, &q)?;
                rows.push(plain_row(&f, w, 2.0, s, s, k.value, om.total).with_aux("argmin_delta", k.argmin_delta));
            }
        }
    }
    Ok(vec![InequalityReport::new(
        "kfunctional_equivalence",
        "K_s estimate against Ω̃_{s,s}",
        rows,
        Bound::band("kfunctional.equivalence", c),
    )])
}

fn kfunctional_sharpness(c: &Constants) -> Result<Vec<InequalityReport>> {
    let q = quad();
    let members = vec![
        on(func("dirichlet", &[])?, unit()),
        on(func("even_denominator", &[])?, unit()),
        on(func("gaussian_bump", &[])?, Domain::line()),
        on(func("sobolev_sample", &[("r", json!(3))])?, interval(-2.0, 2.0)),
        on(func("poly", &[("coeffs", json!([1.0, -1.0, 0.5, 0.25]))])?, interval(-1.0, 1.0)),
    ];
    let mut rows = Vec::new();
    for (f, dom) in members {
        for s in 1..=2 {
            for w in [8.0, 32.0, 128.0] {
                // Odd node counts keep the even-denominator indicator at zero on every node.
                let n = if dom.is_line() { w } else { w + 1.0 };
                let (nodes, scale) = nodes_at(&dom, n)?;
                let om = semi_discrete_modulus(&f, &dom, &nodes, s, s, 2.0, scale, &q)?;
                let t = tau_modulus(&f, &dom, &ModulusRequest::new(s, 1.0 / w, 2.0), &q)?;
                rows.push(plain_row(&f, w, 2.0, s, s, om.total, t));
            }
        }
    }
    Ok(vec![InequalityReport::new(
        "kfunctional_sharpness",
        "Ω̃_{s,s}(f,1/W) against τ_s(f,1/W)_2",
        rows,
        Bound::frozen("kfunctional.sharpness", c),
    )])
}

// ---------------------------------------------------------------------------
// Bernstein

fn bernstein_setting() -> CheckSetting {
    CheckSetting { dom: unit(), r: 2, s: 2, p: 2.0, q: quad() }
}

fn bernstein_stability(_: &Constants) -> Result<Vec<InequalityReport>> {
    let dom = unit();
    let q = quad();
    let mut members = bernstein_corpus()?;
    members.push(func("dirichlet", &[])?);
    members.push(func("even_denominator", &[])?);
    let mut rows = Vec::new();
    for f in &members {
        for &p in &P_VALUES {
            for &n in &N_GRID {
                let fam = OperatorFamily::bernstein(n as usize);
                let lhs = operator_norm(f, &fam, &dom, p, &q)?;
                let rhs = discrete_seminorm(f, &NodeSet::equispaced(0.0, 1.0, n as usize)?, p)?;
                rows.push(Row::new(f.name(), "bernstein", n, p, 0, 0, lhs, rhs));
            }
        }
    }
    Ok(vec![InequalityReport::new("bernstein_stability", "‖B_n f‖_p against ‖f‖_{ℓp(X_n)}", rows, Bound::literal())])
}

fn bernstein_sobolev_rate(c: &Constants) -> Result<Vec<InequalityReport>> {
    let set = bernstein_setting();
    let mut rows = Vec::new();
    for f in bernstein_corpus()? {
        let d2 = f.derivative_function(2).expect("corpus member is in W²");
        let norm = lp_norm(&d2, &set.dom, set.p, None, &set.q)?;
        for &n in &N_GRID {
            let err = operator_error(&f, &OperatorFamily::bernstein(n as usize), &set.dom, set.p, &set.q)?;
            rows.push(Row::new(f.name(), "bernstein", n, set.p, 2, 2, n * err, norm));
        }
    }
    Ok(vec![InequalityReport::new(
        "bernstein_sobolev_rate",
        "n ‖f − B_n f‖_2 against ‖f″‖_2",
        rows,
        Bound::frozen("bernstein.k3", c),
    )])
}

fn bernstein_upper(c: &Constants) -> Result<Vec<InequalityReport>> {
    let set = bernstein_setting();
    let mut members = bernstein_corpus()?;
    members.push(func("dirichlet", &[])?);
    let mut reports = Vec::new();
    for f in &members {
        reports.push(check_upper_estimate(f, &OperatorFamily::bernstein(16), &set, &N_GRID, Bound::frozen("bernstein.upper", c))?);
    }
    Ok(reports)
}

fn affine() -> Result<PointwiseFunction> {
    func("poly", &[("coeffs", json!([1.0, 2.0]))])
}

fn bernstein_upper_affine(_: &Constants) -> Result<Vec<InequalityReport>> {
    let rep = check_upper_estimate(&affine()?, &OperatorFamily::bernstein(16), &bernstein_setting(), &N_GRID, Bound::literal())?;
    Ok(vec![rep])
}

fn bernstein_upper_even_denominator(_: &Constants) -> Result<Vec<InequalityReport>> {
    let f = func("even_denominator", &[])?;
    let scales = [17.0, 33.0, 65.0, 129.0, 257.0];
    let rep = check_upper_estimate(&f, &OperatorFamily::bernstein(17), &bernstein_setting(), &scales, Bound::literal())?;
    Ok(vec![rep])
}

fn bernstein_realization(c: &Constants) -> Result<Vec<InequalityReport>> {
    let set = bernstein_setting();
    let mut members = bernstein_corpus()?;
    members.push(func("dirichlet", &[])?);
    let mut reports = Vec::new();
    for f in &members {
        reports.push(realization_check(f, &OperatorFamily::bernstein(16), &set, &N_GRID, Bound::band("bernstein.realization", c))?);
    }
    Ok(reports)
}

fn bernstein_realization_affine(_: &Constants) -> Result<Vec<InequalityReport>> {
    let rep = realization_check(&affine()?, &OperatorFamily::bernstein(16), &bernstein_setting(), &N_GRID, Bound::ReportOnly)?;
    Ok(vec![rep])
}

fn bernstein_lower_constant(_: &Constants) -> Result<Vec<InequalityReport>> {
    let f = PointwiseFunction::constant(1.5);
    let rep = check_lower_estimate(&f, &OperatorFamily::bernstein(16), &bernstein_setting(), &N_GRID, 1.0, 1.0, Bound::literal())?;
    Ok(vec![rep])
}

// ---------------------------------------------------------------------------
// Generalized sampling

fn line_setting(dom: Domain, r: usize, s: usize) -> CheckSetting {
    CheckSetting { dom, r, s, p: 2.0, q: quad() }
}

fn sampling_stability(_: &Constants) -> Result<Vec<InequalityReport>> {
    let dom = Domain::line();
    let q = quad();
    let mut members = sampling_corpus()?;
    members.push(func("power_singularity", &[("alpha", json!(0.25))])?);
    let mut rows = Vec::new();
    for order in 2..=4 {
        let kernel = KernelSpec::bspline(order)?;
        let (m0, l1) = (m0_moment(&kernel), kernel.l1_norm());
        for f in &members {
            for p in [2.0, 4.0] {
                let constant = m0.powf(1.0 - 1.0 / p) * l1.powf(1.0 / p);
                for &w in &W_GRID {
                    let fam = OperatorFamily::generalized(w, kernel.clone());
                    let lhs = operator_norm(f, &fam, &dom, p, &q)?;
                    let rhs = constant * discrete_seminorm(f, &NodeSet::lattice_for(&dom, w)?, p)?;
                    rows.push(Row::new(f.name(), &fam.name(), w, p, 0, 0, lhs, rhs));
                }
            }
        }
    }
    Ok(vec![InequalityReport::new(
        "sampling_stability",
        "‖S_W^φ f‖_p against m0^{1−1/p}‖φ‖_1^{1/p}‖f‖_{ℓp(Σ_W)}",
        rows,
        Bound::literal(),
    )])
}

/// Jackson-type bound with the explicit constant, at order `r`.
pub fn jackson_rows(kernel: &KernelSpec, r: usize, members: &[PointwiseFunction], ws: &[f64]) -> Result<Vec<Row>> {
    let dom = Domain::line();
    let q = quad();
    let m0 = m0_moment(kernel);
    let factorial: f64 = (1..r).map(|i| i as f64).product();
    let constant = 2.0 * m0 * kernel.reach().powi(r as i32) / factorial;
    let mut rows = Vec::new();
    for f in members {
        let d = f
            .derivative_function(r)
            .ok_or_else(|| Error::Capability(format!("{} has no derivative of order {r}", f.name())))?;
        let dnorm = lp_norm(&d, &dom, 2.0, None, &q)?;
        for &w in ws {
            let fam = OperatorFamily::generalized(w, kernel.clone());
            let err = operator_error(f, &fam, &dom, 2.0, &q)?;
            rows.push(Row::new(f.name(), &fam.name(), w, 2.0, r, r, err, constant * w.powi(-(r as i32)) * dnorm));
        }
    }
    Ok(rows)
}

fn sampling_jackson(_: &Constants) -> Result<Vec<InequalityReport>> {
    let members = sampling_corpus()?;
    let mut reports = Vec::new();
    for order in 2..=4 {
        let kernel = KernelSpec::bspline(order)?;
        let rows = jackson_rows(&kernel, 2, &members, &W_GRID)?;
        reports.push(InequalityReport::new(
            "sampling_jackson",
            "‖S_W^φ f − f‖_2 against 2 m0 T² W^{-2} ‖f″‖_2",
            rows,
            Bound::literal(),
        ));
    }
    Ok(reports)
}

fn sampling_upper(c: &Constants) -> Result<Vec<InequalityReport>> {
    let set = line_setting(Domain::line(), 2, 2);
    let mut members = sampling_corpus()?;
    members.push(func("power_singularity", &[("alpha", json!(0.25))])?);
    let mut reports = Vec::new();
    for order in [2, 3] {
        let fam = OperatorFamily::generalized(8.0, KernelSpec::bspline(order)?);
        for f in &members {
            reports.push(check_upper_estimate(f, &fam, &set, &W_GRID, Bound::frozen("sampling.upper", c))?);
        }
    }
    Ok(reports)
}

fn sampling_realization(c: &Constants) -> Result<Vec<InequalityReport>> {
    let set = line_setting(Domain::line(), 2, 2);
    let fam = OperatorFamily::generalized(8.0, KernelSpec::bspline(3)?);
    let members = [func("gaussian_bump", &[])?, func("sobolev_sample", &[("r", json!(3))])?];
    let mut reports = Vec::new();
    for f in &members {
        reports.push(realization_check(f, &fam, &set, &W_GRID, Bound::band("sampling.realization", c))?);
    }
    Ok(reports)
}

// ---------------------------------------------------------------------------
// Shannon

/// Interpolation defects are reported in units of this tolerance.
pub const INTERPOLATION_TOLERANCE: f64 = 1e-12;

fn shannon_interpolation(_: &Constants) -> Result<Vec<InequalityReport>> {
    let dom = shannon_domain();
    let mut members = shannon_corpus()?;
    members.push(func("sinc_packet", &[])?);
    let mut rows = Vec::new();
    for f in &members {
        for &w in &W_GRID {
            let g = OperatorFamily::shannon(w).apply(f, &dom)?;
            let nodes = NodeSet::lattice_for(&dom, w)?;
            let defect = nodes.points.iter().map(|&x| (g.eval(x) - f.eval(x)).abs()).fold(0.0, f64::max);
            rows.push(Row::new(f.name(), "shannon", w, f64::INFINITY, 0, 0, defect / INTERPOLATION_TOLERANCE, 1.0));
        }
    }
    Ok(vec![InequalityReport::new(
        "shannon_interpolation",
        "max_j |S_W f(j/W) − f(j/W)| in units of 1e-12, against 1",
        rows,
        Bound::literal(),
    )])
}

fn shannon_upper(c: &Constants) -> Result<Vec<InequalityReport>> {
    let set = line_setting(shannon_domain(), 2, 2);
    let mut reports = Vec::new();
    for f in &shannon_corpus()? {
        reports.push(check_upper_estimate(f, &OperatorFamily::shannon(8.0), &set, &W_GRID, Bound::frozen("shannon.upper", c))?);
    }
    Ok(reports)
}

fn shannon_dyadic(c: &Constants) -> Result<Vec<InequalityReport>> {
    let set = line_setting(shannon_domain(), 1, 1);
    let mut reports = Vec::new();
    for f in &shannon_corpus()? {
        reports.push(dyadic_sum_bound(f, &OperatorFamily::shannon(8.0), &set, &[8.0, 16.0, 32.0, 64.0], Bound::frozen("shannon.dyadic", c))?);
    }
    Ok(reports)
}

fn shannon_series(c: &Constants) -> Result<Vec<InequalityReport>> {
    let set = line_setting(shannon_domain(), 1, 1);
    let mut reports = Vec::new();
    for f in &shannon_corpus()? {
        reports.push(series_bound_check(f, &OperatorFamily::shannon(4.0), &set, &[4.0, 8.0], 4, Bound::frozen("shannon.series", c))?);
    }
    Ok(reports)
}

fn shannon_lower(_: &Constants) -> Result<Vec<InequalityReport>> {
    let set = line_setting(shannon_domain(), 2, 2);
    let f = func("gaussian_bump", &[("width", json!(0.5))])?;
    let rep = check_lower_estimate(&f, &OperatorFamily::shannon(8.0), &set, &W_GRID, 1.0, 1.0, Bound::ReportOnly)?;
    Ok(vec![rep])
}
