//! Closed-form reproductions of the three pathological/singular examples.

use serde::Serialize;

use super::rate::{fit_decay, RateReport};
use crate::discrete::{semi_discrete_modulus, NodeSet, OmegaScale};
use crate::error::{Error, Result};
use crate::func::{builtin, params, Domain, Params, QuadratureConfig};
use crate::smoothness::{modulus_of_smoothness, tau_modulus, ModulusRequest};

/// One compared quantity.
#[derive(Clone, Debug, Serialize)]
pub struct ExampleRow {
    pub quantity: String,
    pub n_or_w: f64,
    pub p: f64,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ExampleRow {
    fn new(quantity: &str, n_or_w: f64, p: f64, computed: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            quantity: quantity.to_string(),
            n_or_w,
            p,
            computed,
            expected,
            tolerance,
            pass: (computed - expected).abs() <= tolerance,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExampleReport {
    pub id: u32,
    pub title: String,
    pub rows: Vec<ExampleRow>,
    pub fits: Vec<(String, RateReport)>,
    pub pass: bool,
}

impl ExampleReport {
    fn finish(id: u32, title: &str, rows: Vec<ExampleRow>, fits: Vec<(String, RateReport)>) -> Self {
        let pass = rows.iter().all(|r| r.pass);
        Self { id, title: title.to_string(), rows, fits, pass }
    }

    pub fn failures(&self) -> Vec<&ExampleRow> {
        self.rows.iter().filter(|r| !r.pass).collect()
    }
}

pub const EXAMPLE1_P: [f64; 3] = [1.0, 2.0, 4.0];
pub const EXAMPLE1_N: [usize; 3] = [16, 64, 256];
pub const EXAMPLE2_N: [usize; 2] = [8, 32];
pub const EXAMPLE3_CASES: [(f64, f64); 2] = [(2.0, 0.25), (4.0, 0.1)];
pub const EXAMPLE3_W: [f64; 7] = [16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0];

pub fn reproduce_example(id: u32) -> Result<ExampleReport> {
    match id {
        1 => example1(),
        2 => example2(),
        3 => example3(),
        _ => Err(Error::Config(format!("there is no example {id}; choose 1, 2 or 3"))),
    }
}

/// Dirichlet function on [0, 1] with the equispaced rational nodes `k/n`.
fn example1() -> Result<ExampleReport> {
    let f = builtin("dirichlet", &Params::new())?;
    let (a, b) = (0.0, 1.0);
    let dom = Domain::interval(a, b)?;
    let q = QuadratureConfig::default();
    let mut rows = Vec::new();
    for &p in &EXAMPLE1_P {
        let paper = (b - a).powf(1.0 / p);
        for &n in &EXAMPLE1_N {
            let nf = n as f64;
            let literal = ((nf + 1.0) / nf).powf(1.0 / p) * paper;
            let nodes = NodeSet::equispaced(a, b, n)?;
            let om = semi_discrete_modulus(&f, &dom, &nodes, 1, 1, p, OmegaScale::interval(nf, 1.0), &q)?;
            let omega = modulus_of_smoothness(&f, &dom, &ModulusRequest::new(1, 1.0 / nf, p), &q)?;
            let tau = tau_modulus(&f, &dom, &ModulusRequest::new(1, 1.0 / nf, p), &q)?;
            rows.push(ExampleRow::new("omega", nf, p, omega, 0.0, 0.0));
            rows.push(ExampleRow::new("omega_tilde_vs_literal", nf, p, om.total, literal, 1e-9));
            // At p = 1 the literal and closed-form values differ by exactly 1/n.
            rows.push(ExampleRow::new("omega_tilde_vs_closed_form", nf, p, om.total, paper, 2.0 * paper / nf));
            rows.push(ExampleRow::new("tau_vs_closed_form", nf, p, tau, paper, 1e-9));
            rows.push(ExampleRow::new("tau_vs_literal", nf, p, tau, literal, 2.0 * paper / nf));
        }
    }
    Ok(ExampleReport::finish(1, "Dirichlet function: Ω̃ and τ agree with (b-a)^{1/p}", rows, Vec::new()))
}

/// Even-denominator indicator on [0, 1] with nodes `k/(2n+1)`.
fn example2() -> Result<ExampleReport> {
    let f = builtin("even_denominator", &Params::new())?;
    let dom = Domain::interval(0.0, 1.0)?;
    let q = QuadratureConfig::default();
    let mut rows = Vec::new();
    for &p in &EXAMPLE1_P {
        for &n in &EXAMPLE2_N {
            let m = 2 * n + 1;
            let nodes = NodeSet::equispaced(0.0, 1.0, m)?;
            let om = semi_discrete_modulus(&f, &dom, &nodes, 1, 1, p, OmegaScale::interval(m as f64, 1.0), &q)?;
            let tau = tau_modulus(&f, &dom, &ModulusRequest::new(1, 1.0 / n as f64, p), &q)?;
            rows.push(ExampleRow::new("omega_tilde", n as f64, p, om.total, 0.0, 0.0));
            rows.push(ExampleRow::new("tau", n as f64, p, tau, 1.0, 1e-9));
            rows.push(ExampleRow::new("omega_tilde_over_tau", n as f64, p, om.total / tau, 0.0, 1e-9));
        }
    }
    Ok(ExampleReport::finish(2, "Even-denominator indicator: Ω̃ = 0 < τ", rows, Vec::new()))
}

/// Per-case rates of Ω̃ and its two addends for `x^{-α}` on the line.
pub struct Example3Case {
    pub p: f64,
    pub alpha: f64,
    pub total: RateReport,
    pub discrete: RateReport,
    pub omega: RateReport,
}

pub fn example3_case(p: f64, alpha: f64, ws: &[f64]) -> Result<Example3Case> {
    let f = builtin("power_singularity", &params(&[("alpha", alpha.into())]))?;
    let dom = Domain::line();
    let q = QuadratureConfig::default();
    let (mut t, mut d, mut o) = (Vec::new(), Vec::new(), Vec::new());
    for &w in ws {
        let nodes = NodeSet::uniform_line(w, -1.0, 2.0)?;
        let v = semi_discrete_modulus(&f, &dom, &nodes, 1, 1, p, OmegaScale::line(w), &q)?;
        t.push((w, v.total));
        d.push((w, v.discrete));
        o.push((w, v.omega));
    }
    Ok(Example3Case {
        p,
        alpha,
        total: fit_decay(&t),
        discrete: fit_decay(&d),
        omega: fit_decay(&o),
    })
}

fn example3() -> Result<ExampleReport> {
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &(p, alpha) in &EXAMPLE3_CASES {
        let case = example3_case(p, alpha, &EXAMPLE3_W)?;
        let target = -(1.0 / p - alpha);
        rows.push(ExampleRow::new("order_total", f64::NAN, p, case.total.fitted_order, target, 0.05));
        rows.push(ExampleRow::new("order_discrete", f64::NAN, p, case.discrete.fitted_order, target, 0.08));
        rows.push(ExampleRow::new("order_omega", f64::NAN, p, case.omega.fitted_order, target, 0.08));
        fits.push((format!("total(p={p},alpha={alpha})"), case.total));
        fits.push((format!("discrete(p={p},alpha={alpha})"), case.discrete));
        fits.push((format!("omega(p={p},alpha={alpha})"), case.omega));
    }
    Ok(ExampleReport::finish(3, "x^{-α}: Ω̃ decays like W^{-(1/p-α)}", rows, fits))
}
