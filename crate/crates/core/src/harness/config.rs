//! Experiment configuration files (TOML or JSON).

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::discrete::{semi_discrete_modulus, NodeSet, OmegaScale};
use crate::error::{Error, Result};
use crate::func::{Domain, FunctionSpec, PointwiseFunction, QuadratureConfig};
use crate::operators::{kernel_by_name, operator_error, OperatorFamily, DEFAULT_TRUNC_TERMS};
use crate::smoothness::{modulus_of_smoothness, tau_modulus, ModulusRequest};
use crate::steklov::{steklov_average, SteklovSpec};

/// Operator family without its scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyConfig {
    Bernstein,
    Shannon {
        #[serde(default = "default_trunc")]
        trunc_terms: usize,
    },
    Generalized {
        kernel: String,
    },
}

fn default_trunc() -> usize {
    DEFAULT_TRUNC_TERMS
}

impl FamilyConfig {
    pub fn at(&self, scale: f64) -> Result<OperatorFamily> {
        let family = match self {
            FamilyConfig::Bernstein => OperatorFamily::bernstein(scale.round().max(1.0) as usize),
            FamilyConfig::Shannon { trunc_terms } => OperatorFamily::Shannon { w: scale, trunc_terms: *trunc_terms },
            FamilyConfig::Generalized { kernel } => OperatorFamily::generalized(scale, kernel_by_name(kernel)?),
        };
        family.validate()?;
        Ok(family)
    }

    /// Dyadic defaults: n ∈ {2^4 … 2^8} for Bernstein, W ∈ {2^3 … 2^10} otherwise.
    pub fn default_scales(&self) -> Vec<f64> {
        let range = match self {
            FamilyConfig::Bernstein => 4..=8,
            _ => 3..=10,
        };
        range.map(|k| 2f64.powi(k)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentKind {
    /// ω_r, τ_r and Ω̃_{r,r} on a δ grid.
    Moduli {
        orders: Vec<usize>,
        deltas: Vec<f64>,
    },
    /// Samples of f̃_{δ,r} on a uniform x grid.
    Steklov {
        delta: f64,
        r: usize,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// `‖f − G(f)‖_p` across scales.
    OperatorError {
        family: FamilyConfig,
        #[serde(default)]
        scales: Vec<f64>,
    },
}

fn default_samples() -> usize {
    201
}

fn default_p() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub function: FunctionSpec,
    pub domain: Domain,
    #[serde(default = "default_p")]
    pub p: f64,
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
}

impl ExperimentConfig {
    /// Reads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text)?
        } else {
            Self::from_toml(&text)?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("invalid TOML config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        self.quadrature.validate()?;
        if !(self.p >= 1.0) {
            return Err(Error::Config(format!("p must be ≥ 1, got {}", self.p)));
        }
        self.function.build()?;
        if let ExperimentKind::OperatorError { family, scales } = &self.experiment {
            for &s in scales {
                family.at(s)?.check_domain(&self.domain)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModuliRecord {
    pub f: String,
    pub domain: String,
    pub r: usize,
    pub delta: f64,
    pub p: f64,
    pub omega: f64,
    /// Absent for unbounded functions without an oscillation oracle.
    pub tau: Option<f64>,
    pub omega_tilde: f64,
    pub omega_tilde_discrete: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SteklovRecord {
    pub f: String,
    pub delta: f64,
    pub r: usize,
    pub x: f64,
    pub f_x: f64,
    pub steklov: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OperatorRecord {
    pub f: String,
    pub operator: String,
    pub scale: f64,
    pub p: f64,
    pub error: f64,
}

/// Output of [`ExperimentConfig::run`].
#[derive(Clone, Debug)]
pub enum ExperimentOutput {
    Moduli(Vec<ModuliRecord>),
    Steklov(Vec<SteklovRecord>),
    OperatorError(Vec<OperatorRecord>),
}

impl ExperimentOutput {
    /// Writes the records as CSV with a header row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        match self {
            ExperimentOutput::Moduli(rows) => rows.iter().try_for_each(|r| w.serialize(r))?,
            ExperimentOutput::Steklov(rows) => rows.iter().try_for_each(|r| w.serialize(r))?,
            ExperimentOutput::OperatorError(rows) => rows.iter().try_for_each(|r| w.serialize(r))?,
        }
        w.flush()?;
        Ok(())
    }
}

/// Ω̃ nodes for step δ: the lattice `j/W`, `W = 1/δ`, on the line, or
/// `n = round((b-a)/δ)` equispaced nodes on an interval.
fn omega_tilde_nodes(dom: &Domain, delta: f64) -> Result<(NodeSet, OmegaScale)> {
    match *dom {
        Domain::Line { .. } => Ok((NodeSet::lattice_for(dom, 1.0 / delta)?, OmegaScale::line(1.0 / delta))),
        Domain::Interval { a, b } => {
            let n = ((b - a) / delta).round().max(1.0) as usize;
            Ok((NodeSet::equispaced(a, b, n)?, OmegaScale::interval(n as f64, (b - a).min(1.0))))
        }
    }
}

fn has_tau(f: &PointwiseFunction) -> bool {
    f.regularity().is_bounded() || f.has_oscillation_oracle()
}

impl ExperimentConfig {
    pub fn run(&self) -> Result<ExperimentOutput> {
        self.validate()?;
        let f = self.function.build()?;
        let (dom, q, p) = (&self.domain, &self.quadrature, self.p);
        match &self.experiment {
            ExperimentKind::Moduli { orders, deltas } => {
                let mut rows = Vec::new();
                for &r in orders {
                    for &delta in deltas {
                        let req = ModulusRequest::new(r, delta, p);
                        let omega = modulus_of_smoothness(&f, dom, &req, q)?;
                        let tau = if has_tau(&f) { Some(tau_modulus(&f, dom, &req, q)?) } else { None };
                        let (nodes, scale) = omega_tilde_nodes(dom, delta)?;
                        let om = semi_discrete_modulus(&f, dom, &nodes, r, r, p, scale, q)?;
                        rows.push(ModuliRecord {
                            f: f.name().to_string(),
                            domain: dom.to_string(),
                            r,
                            delta,
                            p,
                            omega,
                            tau,
                            omega_tilde: om.total,
                            omega_tilde_discrete: om.discrete,
                        });
                    }
                }
                Ok(ExperimentOutput::Moduli(rows))
            }
            ExperimentKind::Steklov { delta, r, samples } => {
                let avg = steklov_average(&f, dom, &SteklovSpec::new(*delta, *r))?;
                let (lo, hi) = match (dom, f.support()) {
                    (Domain::Line { .. }, Some((s0, s1))) => (s0 - *r as f64 * delta, s1),
                    _ => dom.bounds(),
                };
                let m = (*samples).max(2) - 1;
                let rows = (0..=m)
                    .map(|i| {
                        let x = lo + (hi - lo) * i as f64 / m as f64;
                        SteklovRecord { f: f.name().to_string(), delta: *delta, r: *r, x, f_x: f.eval(x), steklov: avg.eval(x) }
                    })
                    .collect();
                Ok(ExperimentOutput::Steklov(rows))
            }
            ExperimentKind::OperatorError { family, scales } => {
                let scales = if scales.is_empty() { family.default_scales() } else { scales.clone() };
                let mut rows = Vec::new();
                for s in scales {
                    let g = family.at(s)?;
                    rows.push(OperatorRecord {
                        f: f.name().to_string(),
                        operator: g.name(),
                        scale: g.scale(),
                        p,
                        error: operator_error(&f, &g, dom, p, q)?,
                    });
                }
                Ok(ExperimentOutput::OperatorError(rows))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_toml() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            p = 1.0
            domain = { kind = "interval", a = 0.0, b = 1.0 }
            [function]
            id = "poly"
            params = { coeffs = [0.0, 0.0, 1.0] }
            [experiment]
            kind = "operator_error"
            family = { kind = "bernstein" }
            scales = [16, 32]
            [quadrature]
            cells = 512
            "#,
        )
        .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.quadrature.cells, 512);
        assert_eq!(cfg.quadrature.rule, crate::func::Rule::Gauss3);
        let ExperimentKind::OperatorError { family, scales } = &cfg.experiment else { panic!() };
        assert_eq!(scales, &[16.0, 32.0]);
        assert_eq!(family.default_scales().len(), 5);
    }

    #[test]
    fn parses_json_and_rejects_bad_family() {
        let json = r#"{
            "function": {"id": "gaussian_bump"},
            "domain": {"kind": "line", "lo": -16, "hi": 16},
            "experiment": {"kind": "operator_error", "family": {"kind": "generalized", "kernel": "bspline3"}, "scales": [8]}
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(json).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.p, 2.0);

        let bad = json.replace("\"line\", \"lo\": -16, \"hi\": 16", "\"interval\", \"a\": 0, \"b\": 2")
            .replace("generalized\", \"kernel\": \"bspline3", "bernstein");
        let cfg: ExperimentConfig = serde_json::from_str(&bad).unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn runs_bernstein_square() {
        let cfg = ExperimentConfig {
            function: FunctionSpec::new("poly").with("coeffs", serde_json::json!([0.0, 0.0, 1.0])),
            domain: Domain::interval(0.0, 1.0).unwrap(),
            p: f64::INFINITY,
            experiment: ExperimentKind::OperatorError { family: FamilyConfig::Bernstein, scales: vec![10.0] },
            quadrature: QuadratureConfig::default(),
        };
        let ExperimentOutput::OperatorError(rows) = cfg.run().unwrap() else { panic!() };
        assert!((rows[0].error - 0.025).abs() < 1e-6);
        let mut buf = Vec::new();
        ExperimentOutput::OperatorError(rows).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("f,operator,scale,p,error\n"));
    }

    #[test]
    fn moduli_rows_for_dirichlet() {
        let cfg = ExperimentConfig {
            function: FunctionSpec::new("dirichlet"),
            domain: Domain::interval(0.0, 1.0).unwrap(),
            p: 2.0,
            experiment: ExperimentKind::Moduli { orders: vec![1], deltas: vec![1.0 / 16.0] },
            quadrature: QuadratureConfig::default(),
        };
        let ExperimentOutput::Moduli(rows) = cfg.run().unwrap() else { panic!() };
        assert_eq!(rows[0].omega, 0.0);
        assert!((rows[0].tau.unwrap() - 1.0).abs() < 1e-9);
        assert!((rows[0].omega_tilde - (17.0f64 / 16.0).sqrt()).abs() < 1e-9);
    }
}
