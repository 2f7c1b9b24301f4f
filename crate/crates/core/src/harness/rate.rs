//! Log–log least-squares fits of algebraic decay orders.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitStatus {
    Valid,
    TooFewSamples,
    NarrowRange,
    /// Some value is zero, negative or not finite.
    Degenerate,
}

/// Fitted exponent `α` in `value ≈ c · scale^α`.
#[derive(Clone, Debug, Serialize)]
pub struct RateReport {
    pub samples: Vec<(f64, f64)>,
    pub fitted_order: f64,
    pub r_squared: f64,
    pub residual_max: f64,
    pub status: FitStatus,
}

impl RateReport {
    pub fn is_valid(&self) -> bool {
        self.status == FitStatus::Valid
    }
}

pub const MIN_FIT_SAMPLES: usize = 4;
pub const MIN_FIT_OCTAVES: f64 = 3.0;

pub fn fit_decay(samples: &[(f64, f64)]) -> RateReport {
    let degenerate = samples
        .iter()
        .any(|&(s, v)| !(s > 0.0 && v > 0.0 && s.is_finite() && v.is_finite()));
    if degenerate || samples.len() < 2 {
        return RateReport {
            samples: samples.to_vec(),
            fitted_order: f64::NAN,
            r_squared: f64::NAN,
            residual_max: f64::NAN,
            status: if degenerate { FitStatus::Degenerate } else { FitStatus::TooFewSamples },
        };
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(s, v)| (s.ln(), v.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return RateReport {
            samples: samples.to_vec(),
            fitted_order: f64::NAN,
            r_squared: f64::NAN,
            residual_max: f64::NAN,
            status: FitStatus::NarrowRange,
        };
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = pts.iter().map(|p| (p.1 - intercept - slope * p.0).abs());
    let residual_max = residuals.clone().fold(0.0, f64::max);
    let ss_res: f64 = residuals.map(|r| r * r).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };

    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(s, _)| (lo.min(s), hi.max(s)));
    let status = if samples.len() < MIN_FIT_SAMPLES {
        FitStatus::TooFewSamples
    } else if (hi / lo).log2() < MIN_FIT_OCTAVES {
        FitStatus::NarrowRange
    } else {
        FitStatus::Valid
    };
    RateReport {
        samples: samples.to_vec(),
        fitted_order: slope,
        r_squared,
        residual_max,
        status,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let s: Vec<(f64, f64)> = (3..=10).map(|k| {
            let w = 2f64.powi(k);
            (w, w.powi(-2))
        }).collect();
        let r = fit_decay(&s);
        assert!(r.is_valid());
        assert!((r.fitted_order + 2.0).abs() < 1e-12);
        assert!(r.residual_max < 1e-12);
    }

    #[test]
    fn constant_values() {
        let s: Vec<(f64, f64)> = (0..6).map(|k| (2f64.powi(k), 3.0)).collect();
        let r = fit_decay(&s);
        assert!(r.fitted_order.abs() < 1e-12);
        assert_eq!(r.r_squared, 1.0);
    }

    #[test]
    fn invalid_inputs() {
        assert_eq!(fit_decay(&[(1.0, 1.0), (2.0, 0.0)]).status, FitStatus::Degenerate);
        assert!(fit_decay(&[(1.0, 1.0), (2.0, 0.0)]).fitted_order.is_nan());
        assert_eq!(
            fit_decay(&[(1.0, 1.0), (2.0, 0.5), (4.0, 0.25)]).status,
            FitStatus::TooFewSamples
        );
        let narrow: Vec<(f64, f64)> = (0..5).map(|k| (1.0 + k as f64 * 0.5, 1.0)).collect();
        assert_eq!(fit_decay(&narrow).status, FitStatus::NarrowRange);
    }

    proptest::proptest! {
        #[test]
        fn recovers_random_slopes(alpha in -4.0f64..4.0, c in 0.01f64..100.0) {
            let s: Vec<(f64, f64)> = (0..8).map(|k| {
                let w = 2f64.powi(k);
                (w, c * w.powf(alpha))
            }).collect();
            proptest::prop_assert!((fit_decay(&s).fitted_order - alpha).abs() < 1e-9);
        }
    }
}
