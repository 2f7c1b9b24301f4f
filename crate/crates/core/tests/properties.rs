//! Randomized invariants across the public API.

use proptest::prelude::*;
use serde_json::json;
use smoothness_lab::discrete::{semi_discrete_modulus, NodeSet, OmegaScale};
use smoothness_lab::func::{builtin, lp_norm, params, Domain, PointwiseFunction, QuadratureConfig};
use smoothness_lab::operators::{shannon_apply, DEFAULT_TRUNC_TERMS};
use smoothness_lab::smoothness::{modulus_of_smoothness, tau_modulus, ModulusRequest};
use smoothness_lab::steklov::{steklov_average, SteklovSpec};

fn q() -> QuadratureConfig {
    QuadratureConfig::default().with_cells(256)
}

fn bump(center: f64, width: f64) -> PointwiseFunction {
    builtin("gaussian_bump", &params(&[("center", json!(center)), ("width", json!(width))])).unwrap()
}

fn poly(coeffs: &[f64]) -> PointwiseFunction {
    builtin("poly", &params(&[("coeffs", json!(coeffs))])).unwrap()
}

fn unit() -> Domain {
    Domain::interval(-1.0, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lp_norm_is_homogeneous(coeffs in prop::collection::vec(-2.0f64..2.0, 4), c in -5.0f64..5.0, p in 1.0f64..4.0) {
        let f = poly(&coeffs);
        let cf = PointwiseFunction::linear_combination(&[(c, &f)]);
        let base = lp_norm(&f, &unit(), p, None, &q()).unwrap();
        let scaled = lp_norm(&cf, &unit(), p, None, &q()).unwrap();
        prop_assert!((scaled - c.abs() * base).abs() <= 1e-12 * (1.0 + scaled));
    }

    #[test]
    fn lp_norm_triangle(a in prop::collection::vec(-2.0f64..2.0, 4), b in prop::collection::vec(-2.0f64..2.0, 4), p in 1.0f64..4.0) {
        let (f, g) = (poly(&a), poly(&b));
        let sum = PointwiseFunction::linear_combination(&[(1.0, &f), (1.0, &g)]);
        let n = |h: &PointwiseFunction| lp_norm(h, &unit(), p, None, &q()).unwrap();
        prop_assert!(n(&sum) <= n(&f) + n(&g) + 1e-10);
    }

    #[test]
    fn modulus_is_monotone_in_delta(center in -1.0f64..1.0, width in 0.3f64..1.5, r in 1usize..=3, p in 1.0f64..3.0) {
        let f = bump(center, width);
        let dom = Domain::line();
        let mut last = 0.0;
        for delta in [0.05, 0.1, 0.2, 0.4] {
            let w = modulus_of_smoothness(&f, &dom, &ModulusRequest::new(r, delta, p), &q()).unwrap();
            prop_assert!(w >= last - 1e-12);
            last = w;
        }
    }

    #[test]
    fn modulus_order_reduction(center in -1.0f64..1.0, width in 0.3f64..1.5, delta in 0.05f64..0.5) {
        let f = bump(center, width);
        let dom = Domain::line();
        let w = |k| modulus_of_smoothness(&f, &dom, &ModulusRequest::new(k, delta, 2.0), &q()).unwrap();
        let w1 = w(1);
        let w2 = w(2);
        let w3 = w(3);
        prop_assert!(w2 <= 2.0 * w1 + 1e-9);
        prop_assert!(w3 <= 2.0 * w2 + 1e-9);
    }

    #[test]
    fn omega_below_tau(coeffs in prop::collection::vec(-2.0f64..2.0, 4), k in 1usize..=2, delta in 0.05f64..0.4) {
        let f = poly(&coeffs);
        let req = ModulusRequest::new(k, delta, 2.0);
        let w = modulus_of_smoothness(&f, &unit(), &req, &q()).unwrap();
        let t = tau_modulus(&f, &unit(), &req, &q()).unwrap();
        prop_assert!(w <= t + 1e-9, "ω = {w}, τ = {t}");
    }

    #[test]
    fn steklov_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, r in 1usize..=4, x in -2.0f64..2.0) {
        let dom = Domain::line();
        let (f, g) = (bump(0.0, 0.7), bump(0.5, 0.3));
        let spec = SteklovSpec::new(0.2, r);
        let combo = PointwiseFunction::linear_combination(&[(a, &f), (b, &g)]);
        let lhs = steklov_average(&combo, &dom, &spec).unwrap().eval(x);
        let rhs = a * steklov_average(&f, &dom, &spec).unwrap().eval(x)
            + b * steklov_average(&g, &dom, &spec).unwrap().eval(x);
        prop_assert!((lhs - rhs).abs() <= 1e-10);
    }

    #[test]
    fn steklov_reproduces_constants(c in -10.0f64..10.0, r in 1usize..=5, delta in 0.01f64..0.5, x in -0.9f64..0.9) {
        let f = PointwiseFunction::constant(c);
        let line = steklov_average(&f, &Domain::line(), &SteklovSpec::new(delta, r)).unwrap().eval(x);
        prop_assert!((line - c).abs() <= 1e-12 * (1.0 + c.abs()));
        let interval = steklov_average(&f, &unit(), &SteklovSpec::new(delta.min(0.3), r)).unwrap().eval(x);
        prop_assert!((interval - c).abs() <= 1e-12 * (1.0 + c.abs()));
    }

    #[test]
    fn semi_discrete_is_subadditive(a in prop::collection::vec(-2.0f64..2.0, 4), b in prop::collection::vec(-2.0f64..2.0, 4), n in 8usize..40) {
        let dom = unit();
        let (f, g) = (poly(&a), poly(&b));
        let sum = PointwiseFunction::linear_combination(&[(1.0, &f), (1.0, &g)]);
        let nodes = NodeSet::equispaced(-1.0, 1.0, n).unwrap();
        let scale = OmegaScale::interval(n as f64, 2.0);
        let om = |h: &PointwiseFunction| semi_discrete_modulus(h, &dom, &nodes, 2, 1, 2.0, scale, &q()).unwrap().total;
        prop_assert!(om(&sum) <= om(&f) + om(&g) + 1e-9);
    }

    #[test]
    fn shannon_interpolates_lattice(center in -2.0f64..2.0, width in 0.5f64..2.0, w in 2.0f64..16.0, k in -20i64..20) {
        let f = bump(center, width);
        let dom = Domain::line_window(-16.0, 16.0).unwrap();
        let series = shannon_apply(&f, &dom, w, DEFAULT_TRUNC_TERMS);
        let x = k as f64 / w;
        prop_assert!((series.into_function().eval(x) - f.eval(x)).abs() <= 1e-12);
    }
}

#[test]
fn dirichlet_is_null_but_one_on_rationals() {
    let f = builtin("dirichlet", &params(&[])).unwrap();
    let dom = Domain::interval(0.0, 1.0).unwrap();
    for p in [1.0, 2.0, 4.0] {
        assert_eq!(lp_norm(&f, &dom, p, None, &q()).unwrap(), 0.0);
    }
    for n in [3, 7, 64, 1000] {
        for k in 0..=n {
            assert_eq!(f.eval(k as f64 / n as f64), 1.0);
        }
    }
}

#[test]
fn refinement_changes_norm_by_less_than_a_tenth_percent() {
    let f = bump(0.3, 0.4);
    let coarse = lp_norm(&f, &Domain::line(), 2.0, None, &QuadratureConfig::default().with_cells(512)).unwrap();
    let fine = lp_norm(&f, &Domain::line(), 2.0, None, &QuadratureConfig::default().with_cells(1024)).unwrap();
    assert!((coarse - fine).abs() / fine < 1e-3);
}

#[test]
fn modulus_grid_refinement_is_stable() {
    let f = bump(0.0, 0.8);
    let dom = Domain::line();
    let base = ModulusRequest::new(2, 0.25, 2.0);
    let coarse = modulus_of_smoothness(&f, &dom, &base, &q()).unwrap();
    let refined = base.clone().with_grids(base.h_grid_size * 2, base.t_grid_size * 2);
    let fine = modulus_of_smoothness(&f, &dom, &refined, &q()).unwrap();
    assert!((coarse - fine).abs() / fine < 0.01);
}
