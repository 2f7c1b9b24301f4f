//! Time-limited sampling kernels and their moment conditions.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::func::RealFn;
use crate::steklov::irwin_hall_density;

/// Number of shifts `u ∈ [0, 1)` used by the moment checks.
pub const MOMENT_GRID: usize = 4096;

/// A continuous kernel φ vanishing outside `[T0, T1]`.
#[derive(Clone)]
pub struct KernelSpec {
    name: String,
    phi: RealFn,
    support: (f64, f64),
    knots: Vec<f64>,
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec")
            .field("name", &self.name)
            .field("support", &self.support)
            .finish()
    }
}

impl KernelSpec {
    pub fn new<F>(name: impl Into<String>, support: (f64, f64), phi: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let (t0, t1) = support;
        if !(t0 < t1 && t0.is_finite() && t1.is_finite()) {
            return Err(Error::Config(format!("kernel support [{t0}, {t1}] is invalid")));
        }
        Ok(Self {
            name: name.into(),
            phi: Arc::new(phi),
            support,
            knots: Vec::new(),
        })
    }

    /// Centered cardinal B-spline `M_n(t) = IH_n(t + n/2)` on `[-n/2, n/2]`.
    pub fn bspline(order: usize) -> Result<Self> {
        if !(1..=8).contains(&order) {
            return Err(Error::Config(format!("B-spline kernel order must lie in 1..=8, got {order}")));
        }
        let half = order as f64 / 2.0;
        let mut k = Self::new(format!("bspline{order}"), (-half, half), move |t| {
            irwin_hall_density(order, t + half)
        })?;
        k.knots = (0..=order).map(|i| i as f64 - half).collect();
        Ok(k)
    }

    /// `c · φ`.
    pub fn scaled(&self, c: f64) -> Self {
        let phi = self.phi.clone();
        Self {
            name: format!("{c}*{}", self.name),
            phi: Arc::new(move |t| c * phi(t)),
            support: self.support,
            knots: self.knots.clone(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Points where φ is not smooth.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// `T = max(|T0|, |T1|)`.
    pub fn reach(&self) -> f64 {
        self.support.0.abs().max(self.support.1.abs())
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        if t < self.support.0 || t > self.support.1 {
            0.0
        } else {
            (self.phi)(t)
        }
    }

    /// Integers k with `u - k ∈ [T0, T1]`.
    pub fn shifts(&self, u: f64) -> std::ops::RangeInclusive<i64> {
        ((u - self.support.1).ceil() as i64)..=((u - self.support.0).floor() as i64)
    }

    /// `‖φ‖_1`.
    pub fn l1_norm(&self) -> f64 {
        let q = crate::func::QuadratureConfig::default().with_cells(4096);
        crate::func::integrate(|t| self.eval(t).abs(), self.support.0, self.support.1, &self.knots, &q)
    }
}

/// Looks a kernel up by name: `bspline1` … `bspline8`, or `hat` for `bspline2`.
pub fn kernel_by_name(name: &str) -> Result<KernelSpec> {
    if name == "hat" {
        return KernelSpec::bspline(2);
    }
    match name.strip_prefix("bspline").and_then(|s| s.parse::<usize>().ok()) {
        Some(order) => KernelSpec::bspline(order),
        None => Err(Error::Config(format!("unknown kernel `{name}`"))),
    }
}

fn moment_grid() -> impl Iterator<Item = f64> {
    (0..MOMENT_GRID).map(|i| i as f64 / MOMENT_GRID as f64)
}

/// `m_0(φ) = sup_u Σ_k |φ(u - k)|`, by maximizing over a grid of `[0, 1)`.
pub fn m0_moment(kernel: &KernelSpec) -> f64 {
    moment_grid()
        .map(|u| kernel.shifts(u).map(|k| kernel.eval(u - k as f64).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `sup_u |Σ_k φ(u - k) - 1|` over the moment grid.
pub fn partition_of_unity_defect(kernel: &KernelSpec) -> f64 {
    moment_grid()
        .map(|u| (kernel.shifts(u).map(|k| kernel.eval(u - k as f64)).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max)
}

/// `max_{u, 1 ≤ j < r} |Σ_k (k - u)^j φ(u - k)|`; zero when the vanishing
/// moment condition of order r holds.
pub fn strang_fix_defect(kernel: &KernelSpec, r: usize) -> f64 {
    if r <= 1 {
        return 0.0;
    }
    moment_grid()
        .flat_map(|u| {
            (1..r).map(move |j| {
                kernel
                    .shifts(u)
                    .map(|k| (k as f64 - u).powi(j as i32) * kernel.eval(u - k as f64))
                    .sum::<f64>()
                    .abs()
            })
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Hat function plus a ripple whose integer shifts cancel: still a
    /// partition of unity, but no longer nonnegative.
    fn rippled_hat() -> KernelSpec {
        KernelSpec::new("rippled_hat", (-1.0, 1.0), |t: f64| {
            (1.0 - t.abs()) + 0.5 * (std::f64::consts::PI * t).sin()
        })
        .unwrap()
    }

    #[test]
    fn bspline_moments() {
        for order in 1..=5 {
            let k = KernelSpec::bspline(order).unwrap();
            assert!((m0_moment(&k) - 1.0).abs() < 1e-12, "order {order}");
            assert!(partition_of_unity_defect(&k) < 1e-12);
            assert!((k.l1_norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn homogeneity_and_ripple() {
        let hat = KernelSpec::bspline(2).unwrap();
        assert!((m0_moment(&hat.scaled(2.0)) - 2.0 * m0_moment(&hat)).abs() < 1e-12);
        let r = rippled_hat();
        assert!(partition_of_unity_defect(&r) < 1e-12);
        assert!(m0_moment(&r) > 1.0);
    }

    #[test]
    fn strang_fix_examples() {
        let rip = rippled_hat();
        assert_eq!(strang_fix_defect(&rip, 1), 0.0);
        let hat = KernelSpec::bspline(2).unwrap();
        assert!(strang_fix_defect(&hat, 2) <= 1e-12);
        assert!(strang_fix_defect(&hat, 3) > 0.1);
        assert!((strang_fix_defect(&hat, 3) - 0.25).abs() < 1e-12);
        // From order 3 on, the second moment sum is the constant order/12.
        for order in 2..=5 {
            let k = KernelSpec::bspline(order).unwrap();
            assert!(strang_fix_defect(&k, 2) <= 1e-12);
            if order >= 3 {
                let second = strang_fix_defect(&k, 3);
                assert!((second - order as f64 / 12.0).abs() < 1e-12, "order {order}: {second}");
            }
        }
    }

    #[test]
    fn lookup() {
        assert_eq!(kernel_by_name("hat").unwrap().support(), (-1.0, 1.0));
        assert_eq!(kernel_by_name("bspline3").unwrap().reach(), 1.5);
        assert!(kernel_by_name("gauss").is_err());
    }
}
