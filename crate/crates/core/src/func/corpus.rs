//! Built-in test and pathological functions, addressable by name.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{binomial, rational_approximation, PointwiseFunction, RealFn, Regularity};
use super::{RATIONAL_MAX_DENOMINATOR, RATIONAL_TOLERANCE};
use crate::error::{Error, Result};
use crate::steklov::irwin_hall_density;

/// Named parameters of a built-in function.
pub type Params = BTreeMap<String, Value>;

/// Builds a parameter map from literal pairs.
pub fn params(pairs: &[(&str, Value)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// A function id with its parameters, as it appears in config files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub id: String,
    #[serde(default)]
    pub params: Params,
}

impl FunctionSpec {
    pub fn new(id: impl Into<String>) -> Self {
        Self { id: id.into(), params: Params::new() }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn build(&self) -> Result<PointwiseFunction> {
        builtin(&self.id, &self.params)
    }

    /// Short label such as `bspline(order=3)`.
    pub fn label(&self) -> String {
        if self.params.is_empty() {
            return self.id.clone();
        }
        let args: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}({})", self.id, args.join(","))
    }
}

/// Catalogue line for `corpus list`.
#[derive(Clone, Debug, Serialize)]
pub struct CorpusEntry {
    pub id: &'static str,
    pub params: &'static str,
    pub description: &'static str,
}

pub fn corpus_entries() -> Vec<CorpusEntry> {
    vec![
        CorpusEntry {
            id: "dirichlet",
            params: "",
            description: "indicator of the rationals; zero almost everywhere",
        },
        CorpusEntry {
            id: "even_denominator",
            params: "",
            description: "1 at rationals with even reduced denominator, 0 elsewhere",
        },
        CorpusEntry {
            id: "power_singularity",
            params: "alpha in (0,1)",
            description: "x^-alpha on (0,1), 0 elsewhere",
        },
        CorpusEntry {
            id: "bspline",
            params: "order in 1..=8 (4), center (0)",
            description: "centered cardinal B-spline",
        },
        CorpusEntry {
            id: "gaussian_bump",
            params: "center (0), width (1)",
            description: "exp(-((x-center)/width)^2)",
        },
        CorpusEntry {
            id: "poly",
            params: "coeffs [c0, c1, ...]",
            description: "polynomial c0 + c1 x + ...",
        },
        CorpusEntry {
            id: "sinc_packet",
            params: "power >= 2 (4)",
            description: "sinc(x/power)^power, band-limited to [-pi, pi]",
        },
        CorpusEntry {
            id: "sobolev_sample",
            params: "r >= 1 (2), center (0), half_width (1)",
            description: "(1 - ((x-center)/half_width)^2)_+^r, in W^r_p",
        },
    ]
}

fn get_f64(params: &Params, key: &str, default: Option<f64>) -> Result<f64> {
    match params.get(key) {
        Some(v) => v
            .as_f64()
            .ok_or_else(|| Error::Config(format!("parameter `{key}` must be a number, got {v}"))),
        None => default.ok_or_else(|| Error::Config(format!("missing parameter `{key}`"))),
    }
}

fn get_usize(params: &Params, key: &str, default: usize) -> Result<usize> {
    match params.get(key) {
        Some(v) => v
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| Error::Config(format!("parameter `{key}` must be a non-negative integer, got {v}"))),
        None => Ok(default),
    }
}

fn check_keys(id: &str, params: &Params, allowed: &[&str]) -> Result<()> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::Config(format!("`{id}` has no parameter `{k}`"))),
        None => Ok(()),
    }
}

/// Builds the corpus member `name`.
pub fn builtin(name: &str, params: &Params) -> Result<PointwiseFunction> {
    match name {
        "dirichlet" => {
            check_keys(name, params, &[])?;
            Ok(dirichlet())
        }
        "even_denominator" => {
            check_keys(name, params, &[])?;
            Ok(even_denominator())
        }
        "power_singularity" => {
            check_keys(name, params, &["alpha"])?;
            let alpha = get_f64(params, "alpha", None)?;
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")));
            }
            Ok(power_singularity(alpha))
        }
        "bspline" => {
            check_keys(name, params, &["order", "center"])?;
            let order = get_usize(params, "order", 4)?;
            if !(1..=8).contains(&order) {
                return Err(Error::Config(format!("bspline order must lie in 1..=8, got {order}")));
            }
            Ok(bspline(order, get_f64(params, "center", Some(0.0))?))
        }
        "gaussian_bump" => {
            check_keys(name, params, &["center", "width"])?;
            let width = get_f64(params, "width", Some(1.0))?;
            if !(width > 0.0) {
                return Err(Error::Config(format!("width must be positive, got {width}")));
            }
            Ok(gaussian_bump(get_f64(params, "center", Some(0.0))?, width))
        }
        "poly" => {
            check_keys(name, params, &["coeffs"])?;
            let coeffs = params
                .get("coeffs")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Config("poly needs an array `coeffs`".into()))?
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| Error::Config(format!("bad coefficient {v}"))))
                .collect::<Result<Vec<f64>>>()?;
            Ok(poly(coeffs))
        }
        "sinc_packet" => {
            check_keys(name, params, &["power"])?;
            let power = get_usize(params, "power", 4)?;
            if power < 2 {
                return Err(Error::Config(format!("sinc_packet power must be ≥ 2, got {power}")));
            }
            Ok(sinc_packet(power))
        }
        "sobolev_sample" => {
            check_keys(name, params, &["r", "center", "half_width"])?;
            let r = get_usize(params, "r", 2)?;
            let h = get_f64(params, "half_width", Some(1.0))?;
            if r == 0 || !(h > 0.0) {
                return Err(Error::Config("sobolev_sample needs r ≥ 1 and half_width > 0".into()));
            }
            Ok(sobolev_sample(r, get_f64(params, "center", Some(0.0))?, h))
        }
        other => Err(Error::Config(format!("unknown function `{other}`"))),
    }
}

fn detect(x: f64) -> Option<(i64, i64)> {
    rational_approximation(x, RATIONAL_MAX_DENOMINATOR, RATIONAL_TOLERANCE)
}

fn dirichlet() -> PointwiseFunction {
    PointwiseFunction::new("dirichlet", |x| if detect(x).is_some() { 1.0 } else { 0.0 })
        .with_ae_rep(|_| 0.0)
        .with_oscillation_oracle(|k, _x, delta| {
            if delta > 0.0 { binomial(k, k / 2) } else { 0.0 }
        })
        .with_regularity(Regularity::Pathological)
}

fn even_denominator() -> PointwiseFunction {
    PointwiseFunction::new("even_denominator", |x| match detect(x) {
        Some((_, q)) if q % 2 == 0 => 1.0,
        _ => 0.0,
    })
    .with_ae_rep(|_| 0.0)
    .with_oscillation_oracle(|k, _x, delta| {
        if delta > 0.0 && k >= 1 { 2f64.powi(k as i32 - 1) } else { 0.0 }
    })
    .with_regularity(Regularity::Pathological)
}

fn power_singularity(alpha: f64) -> PointwiseFunction {
    PointwiseFunction::new(format!("power_singularity({alpha})"), move |x: f64| {
        if x > 0.0 && x < 1.0 { x.powf(-alpha) } else { 0.0 }
    })
    .with_regularity(Regularity::Lp)
    .with_support(0.0, 1.0)
    .with_breakpoints(vec![0.0, 1.0])
}

fn bspline(order: usize, center: f64) -> PointwiseFunction {
    let half = order as f64 / 2.0;
    let derivs = (1..order)
        .map(|k| {
            let m = order - k;
            let kh = k as f64 / 2.0;
            Arc::new(move |x: f64| {
                (0..=k)
                    .map(|i| {
                        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                        sign * binomial(k, i)
                            * irwin_hall_density(m, x - center + kh - i as f64 + m as f64 / 2.0)
                    })
                    .sum()
            }) as RealFn
        })
        .collect();
    PointwiseFunction::new(format!("bspline({order})"), move |x| {
        irwin_hall_density(order, x - center + half)
    })
    .with_derivatives(derivs)
    .with_regularity(Regularity::Sobolev(order as u32 - 1))
    .with_support(center - half, center + half)
    .with_breakpoints((0..=order).map(|i| center - half + i as f64).collect())
}

/// Physicists' Hermite polynomial `H_n(u)`.
fn hermite(n: usize, u: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * u);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        (h0, h1) = (h1, 2.0 * u * h1 - 2.0 * k as f64 * h0);
    }
    h1
}

const GAUSSIAN_DERIVATIVES: usize = 8;

fn gaussian_bump(center: f64, width: f64) -> PointwiseFunction {
    let derivs = (1..=GAUSSIAN_DERIVATIVES)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let scale = sign / width.powi(k as i32);
            Arc::new(move |x: f64| {
                let u = (x - center) / width;
                scale * hermite(k, u) * (-u * u).exp()
            }) as RealFn
        })
        .collect();
    PointwiseFunction::new(format!("gaussian_bump({center},{width})"), move |x: f64| {
        let u = (x - center) / width;
        (-u * u).exp()
    })
    .with_derivatives(derivs)
    .with_regularity(Regularity::Sobolev(GAUSSIAN_DERIVATIVES as u32))
    .with_support(center - 9.0 * width, center + 9.0 * width)
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

const POLY_DERIVATIVES: usize = 8;

fn poly(coeffs: Vec<f64>) -> PointwiseFunction {
    let mut derivs: Vec<RealFn> = Vec::new();
    let mut c = coeffs.clone();
    for _ in 0..POLY_DERIVATIVES {
        c = c.iter().enumerate().skip(1).map(|(i, a)| i as f64 * a).collect();
        let cc = c.clone();
        derivs.push(Arc::new(move |x| horner(&cc, x)));
    }
    let name = format!("poly({coeffs:?})");
    PointwiseFunction::new(name, move |x| horner(&coeffs, x))
        .with_derivatives(derivs)
        .with_regularity(Regularity::Sobolev(POLY_DERIVATIVES as u32))
}

/// `sin(πt)/(πt)`, with value 1 at 0.
pub fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        let a = PI * t;
        a.sin() / a
    }
}

fn sinc_packet(power: usize) -> PointwiseFunction {
    let m = power as f64;
    PointwiseFunction::new(format!("sinc_packet({power})"), move |x: f64| {
        sinc(x / m).powi(power as i32)
    })
    .with_regularity(Regularity::Bounded)
}

fn sobolev_sample(r: usize, center: f64, half_width: f64) -> PointwiseFunction {
    // (1 - u²)^r as a polynomial in u.
    let mut coeffs = vec![0.0; 2 * r + 1];
    for j in 0..=r {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[2 * j] = sign * binomial(r, j);
    }
    let inside = move |x: f64| ((x - center) / half_width).abs() < 1.0;
    let mut derivs: Vec<RealFn> = Vec::new();
    let mut c = coeffs.clone();
    for k in 1..=r {
        c = c.iter().enumerate().skip(1).map(|(i, a)| i as f64 * a).collect();
        let cc = c.clone();
        let scale = half_width.powi(-(k as i32));
        derivs.push(Arc::new(move |x| {
            if inside(x) { scale * horner(&cc, (x - center) / half_width) } else { 0.0 }
        }));
    }
    PointwiseFunction::new(format!("sobolev_sample({r})"), move |x: f64| {
        let u = (x - center) / half_width;
        if u.abs() < 1.0 { (1.0 - u * u).powi(r as i32) } else { 0.0 }
    })
    .with_derivatives(derivs)
    .with_regularity(Regularity::Sobolev(r as u32))
    .with_support(center - half_width, center + half_width)
    .with_breakpoints(vec![center - half_width, center + half_width])
}
