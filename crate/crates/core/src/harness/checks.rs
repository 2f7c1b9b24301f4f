//! Checkers for the operator error estimates.
//!
//! Every checker sweeps a family over a grid of scales and tabulates both
//! sides of an inequality. Node sets and Ω̃ scales follow from the family:
//! Bernstein operators of degree n use the nodes `k/n` with Steklov and
//! modulus steps `1/√n`; line families at density W use the lattice `j/W`
//! over the domain window with both steps `1/W`.

use std::collections::BTreeMap;

use super::report::{Bound, InequalityReport, Row};
use crate::discrete::{semi_discrete_modulus, NodeSet, OmegaScale, SemiDiscrete};
use crate::error::{Error, Result};
use crate::func::{lp_norm, Domain, PointwiseFunction, QuadratureConfig};
use crate::operators::{central_derivative, operator_error, OperatorFamily};
use crate::smoothness::{modulus_of_smoothness, ModulusRequest};

/// Parameters common to every check.
#[derive(Clone, Debug)]
pub struct CheckSetting {
    pub dom: Domain,
    pub r: usize,
    pub s: usize,
    pub p: f64,
    pub q: QuadratureConfig,
}

/// Nodes and Ω̃ scale matching a family instance.
pub fn nodes_and_scale(family: &OperatorFamily, dom: &Domain) -> Result<(NodeSet, OmegaScale)> {
    match family {
        OperatorFamily::Bernstein { n } => {
            let step = 1.0 / (*n as f64).sqrt();
            Ok((NodeSet::equispaced(0.0, 1.0, *n)?, OmegaScale::custom(step, step)))
        }
        _ => {
            let w = family.scale();
            Ok((NodeSet::lattice_for(dom, w)?, OmegaScale::line(w)))
        }
    }
}

/// Ω̃_{r,s} at the scale of `family`.
pub fn omega_tilde(f: &PointwiseFunction, family: &OperatorFamily, set: &CheckSetting) -> Result<(SemiDiscrete, OmegaScale)> {
    let (nodes, scale) = nodes_and_scale(family, &set.dom)?;
    let v = semi_discrete_modulus(f, &set.dom, &nodes, set.r, set.s, set.p, scale, &set.q)?;
    Ok((v, scale))
}

fn row(f: &PointwiseFunction, family: &OperatorFamily, set: &CheckSetting, lhs: f64, rhs: f64) -> Row {
    Row::new(f.name(), &family.name(), family.scale(), set.p, set.r, set.s, lhs, rhs)
}

/// Norm of a function produced by `family`, over the range used for its error.
fn output_norm(g: &PointwiseFunction, f: &PointwiseFunction, family: &OperatorFamily, set: &CheckSetting) -> Result<f64> {
    let ((lo, hi), fine) = family.error_quadrature(f, &set.dom, &set.q);
    if hi <= lo {
        return Ok(0.0);
    }
    lp_norm(g, &set.dom, set.p, Some((lo, hi)), &fine)
}

/// `‖f − G(f)‖_p ≤ C · Ω̃_{r,s}(f)_p` across `scales`.
pub fn check_upper_estimate(
    f: &PointwiseFunction,
    family: &OperatorFamily,
    set: &CheckSetting,
    scales: &[f64],
    bound: Bound,
) -> Result<InequalityReport> {
    let mut rows = Vec::new();
    for &scale in scales {
        let g = family.at_scale(scale);
        let err = operator_error(f, &g, &set.dom, set.p, &set.q)?;
        let (om, _) = omega_tilde(f, &g, set)?;
        rows.push(
            row(f, &g, set, err, om.total)
                .with_aux("discrete", om.discrete)
                .with_aux("omega", om.omega),
        );
    }
    Ok(InequalityReport::new(
        "upper_estimate",
        "‖f − G(f)‖_p against Ω̃_{r,s}(f)_p",
        rows,
        bound,
    ))
}

/// `K2 ‖f̃ − f‖_{ℓ_p} − C1 ω_s(f) ≤ ‖f − G(f)‖_p` for a hypothesized K2, C1.
#[allow(clippy::too_many_arguments)]
pub fn check_lower_estimate(
    f: &PointwiseFunction,
    family: &OperatorFamily,
    set: &CheckSetting,
    scales: &[f64],
    k2: f64,
    c1: f64,
    bound: Bound,
) -> Result<InequalityReport> {
    let mut rows = Vec::new();
    for &scale in scales {
        let g = family.at_scale(scale);
        let err = operator_error(f, &g, &set.dom, set.p, &set.q)?;
        let (om, _) = omega_tilde(f, &g, set)?;
        let lhs = k2 * om.discrete - c1 * om.omega;
        rows.push(
            row(f, &g, set, lhs, err)
                .with_aux("discrete", om.discrete)
                .with_aux("omega", om.omega),
        );
    }
    Ok(InequalityReport::new(
        "lower_estimate",
        "K2·‖f̃ − f‖_ℓp − C1·ω_s(f) against ‖f − G(f)‖_p",
        rows,
        bound,
    )
    .conditional()
    .with_note(format!("assumes the lower stability hypothesis with K2 = {k2}, C1 = {c1}")))
}

/// Errors `‖f − G_{2^k} f‖_p`, with the convention `G_{1/2} = 0`.
struct DyadicErrors<'a> {
    f: &'a PointwiseFunction,
    family: &'a OperatorFamily,
    set: &'a CheckSetting,
    cache: BTreeMap<i32, f64>,
}

impl DyadicErrors<'_> {
    fn get(&mut self, k: i32) -> Result<f64> {
        if let Some(v) = self.cache.get(&k) {
            return Ok(*v);
        }
        let v = if k < 0 {
            lp_norm(self.f, &self.set.dom, self.set.p, None, &self.set.q)?
        } else {
            operator_error(self.f, &self.family.at_scale(2f64.powi(k)), &self.set.dom, self.set.p, &self.set.q)?
        };
        self.cache.insert(k, v);
        Ok(v)
    }
}

/// Measured `‖(G_{2^ν} − G_{2^{ν−1}})^{(s)}‖_p / (2^{sν} ‖G_{2^ν} − G_{2^{ν−1}}‖_p)`.
fn bernstein_type_ratio(f: &PointwiseFunction, family: &OperatorFamily, set: &CheckSetting, nu: i32) -> Result<Option<f64>> {
    let hi = family.at_scale(2f64.powi(nu)).apply(f, &set.dom)?;
    let diff = if nu == 0 {
        hi
    } else {
        let lo = family.at_scale(2f64.powi(nu - 1)).apply(f, &set.dom)?;
        hi.minus(&lo)
    };
    let top = family.at_scale(2f64.powi(nu));
    let d = central_derivative(&diff, set.s, 1.0 / (64.0 * 2f64.powi(nu)));
    let num = output_norm(&d, f, &top, set)?;
    let den = 2f64.powi(set.s as i32 * nu) * output_norm(&diff, f, &top, set)?;
    Ok((den > super::report::ZERO_LEVEL).then(|| num / den))
}

/// Ω̃ against the dyadic telescoping sum of operator errors, with the
/// Bernstein-type ratios K4 measured per level.
pub fn dyadic_sum_bound(
    f: &PointwiseFunction,
    family: &OperatorFamily,
    set: &CheckSetting,
    w_grid: &[f64],
    bound: Bound,
) -> Result<InequalityReport> {
    let mut errs = DyadicErrors { f, family, set, cache: BTreeMap::new() };
    let mut rows = Vec::new();
    let mut k4_levels: BTreeMap<i32, Option<f64>> = BTreeMap::new();
    for &w in w_grid {
        let g = family.at_scale(w);
        let (om, _) = omega_tilde(f, &g, set)?;
        let top = w.log2().floor() as i32;
        let mut sum = 0.0;
        for k in 0..=top {
            sum += 2f64.powi(set.s as i32 * k) * (errs.get(k)? + errs.get(k - 1)?);
        }
        let err_w = operator_error(f, &g, &set.dom, set.p, &set.q)?;
        let rhs = err_w + w.powi(-(set.s as i32)) * sum;
        let mut k4_max = 0.0_f64;
        for nu in 0..=top {
            if !k4_levels.contains_key(&nu) {
                k4_levels.insert(nu, bernstein_type_ratio(f, family, set, nu)?);
            }
            if let Some(Some(v)) = k4_levels.get(&nu) {
                k4_max = k4_max.max(*v);
            }
        }
        rows.push(row(f, &g, set, om.total, rhs).with_aux("k4_max", k4_max));
    }
    let mut report = InequalityReport::new(
        "dyadic_sum_bound",
        "Ω̃_{r,s}(f)_p against the dyadic sum of operator errors",
        rows,
        bound,
    );
    for (nu, v) in k4_levels {
        let text = v.map_or("undefined (zero increment)".to_string(), |x| format!("{x:.6e}"));
        report = report.with_note(format!("K4 at level {nu}: {text}"));
    }
    Ok(report)
}

/// `‖f − G(f)‖_p + step^s ‖(G f)^{(s)}‖_p` against Ω̃, with the K5 ratio
/// `step^s ‖(G f)^{(s)}‖_p / ω_s(G f, step)_p` measured per scale.
pub fn realization_check(
    f: &PointwiseFunction,
    family: &OperatorFamily,
    set: &CheckSetting,
    scales: &[f64],
    bound: Bound,
) -> Result<InequalityReport> {
    let mut rows = Vec::new();
    for &scale in scales {
        let g = family.at_scale(scale);
        let err = operator_error(f, &g, &set.dom, set.p, &set.q)?;
        let (om, omega_scale) = omega_tilde(f, &g, set)?;
        let step = omega_scale.modulus_step;
        let gf = g.apply(f, &set.dom)?;
        let dgf = g.derivative(f, &set.dom, set.s)?;
        let penalty = step.powi(set.s as i32) * output_norm(&dgf, f, &g, set)?;
        let ((lo, hi), fine) = g.error_quadrature(f, &set.dom, &set.q);
        let gf = if set.dom.is_line() { gf.with_support(lo, hi) } else { gf };
        let om_g = modulus_of_smoothness(&gf, &set.dom, &ModulusRequest::new(set.s, step, set.p), &fine)?;
        let k5 = if om_g > super::report::ZERO_LEVEL { penalty / om_g } else { f64::NAN };
        rows.push(
            row(f, &g, set, err + penalty, om.total)
                .with_aux("error", err)
                .with_aux("derivative_term", penalty)
                .with_aux("k5", k5),
        );
    }
    Ok(InequalityReport::new(
        "realization",
        "‖f − G(f)‖_p + step^s‖(G f)^(s)‖_p against Ω̃_{r,s}(f)_p",
        rows,
        bound,
    ))
}

/// Truncated tail fraction above which the series bound is flagged.
pub const SERIES_TAIL_FLAG: f64 = 0.01;

/// Ω̃(f, 1/W) against `Σ_{k=1}^{k_max} (W 2^k)^{-s} ‖(G_{W 2^k} f)^{(s)}‖_p` for
/// interpolating families.
pub fn series_bound_check(
    f: &PointwiseFunction,
    family: &OperatorFamily,
    set: &CheckSetting,
    w_grid: &[f64],
    k_max: usize,
    bound: Bound,
) -> Result<InequalityReport> {
    if !family.interpolates() {
        return Err(Error::Capability(format!(
            "{} does not interpolate on its lattice",
            family.name()
        )));
    }
    let mut rows = Vec::new();
    let mut flagged = Vec::new();
    for &w in w_grid {
        let g = family.at_scale(w);
        let (om, _) = omega_tilde(f, &g, set)?;
        let mut terms = Vec::with_capacity(k_max);
        for k in 1..=k_max {
            let wk = w * 2f64.powi(k as i32);
            let gk = family.at_scale(wk);
            let d = gk.derivative(f, &set.dom, set.s)?;
            terms.push(wk.powi(-(set.s as i32)) * output_norm(&d, f, &gk, set)?);
        }
        let sum: f64 = terms.iter().sum();
        let tail = terms.last().copied().unwrap_or(0.0) / sum.max(f64::MIN_POSITIVE);
        if tail > SERIES_TAIL_FLAG {
            flagged.push(w);
        }
        rows.push(row(f, &g, set, om.total, sum).with_aux("tail_fraction", tail));
    }
    let mut report = InequalityReport::new(
        "series_bound",
        "Ω̃_{r,s}(f)_p against the truncated derivative series",
        rows,
        bound,
    );
    if !flagged.is_empty() {
        report = report.with_note(format!("last series term exceeds 1% of the sum at W = {flagged:?}"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{builtin, Params};
    use crate::harness::report::Verdict;

    fn interval_setting() -> CheckSetting {
        CheckSetting {
            dom: Domain::interval(0.0, 1.0).unwrap(),
            r: 2,
            s: 2,
            p: 2.0,
            q: QuadratureConfig::default().with_cells(256),
        }
    }

    #[test]
    fn affine_bernstein_is_degenerate() {
        let f = PointwiseFunction::new("affine", |x| 1.0 + 2.0 * x);
        let set = interval_setting();
        let rep = check_upper_estimate(&f, &OperatorFamily::bernstein(16), &set, &[16.0, 32.0], Bound::literal()).unwrap();
        assert_eq!(rep.verdict, Verdict::Degenerate);
        let rep = realization_check(&f, &OperatorFamily::bernstein(16), &set, &[16.0, 32.0], Bound::ReportOnly).unwrap();
        assert_eq!(rep.verdict, Verdict::Degenerate);
    }

    #[test]
    fn constant_lower_check_is_degenerate() {
        let f = PointwiseFunction::constant(2.0);
        let rep = check_lower_estimate(&f, &OperatorFamily::bernstein(8), &interval_setting(), &[8.0, 16.0], 1.0, 1.0, Bound::ReportOnly)
            .unwrap();
        assert_eq!(rep.verdict, Verdict::Degenerate);
        assert!(rep.conditional);
    }

    #[test]
    fn series_needs_interpolation() {
        let f = builtin("gaussian_bump", &Params::new()).unwrap();
        let set = CheckSetting { dom: Domain::line(), r: 1, s: 1, p: 2.0, q: QuadratureConfig::default() };
        let fam = OperatorFamily::generalized(8.0, crate::operators::KernelSpec::bspline(2).unwrap());
        assert!(matches!(
            series_bound_check(&f, &fam, &set, &[8.0], 2, Bound::ReportOnly),
            Err(Error::Capability(_))
        ));
    }
}
