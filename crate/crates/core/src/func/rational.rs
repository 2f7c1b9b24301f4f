//! Detection of rational arguments by continued fractions.

/// Largest denominator accepted as rational.
pub const RATIONAL_MAX_DENOMINATOR: i64 = 1_000_000;

/// Maximum distance between `x` and `p/q`, relative to `max(1, |x|)`, for `x`
/// to count as rational. A few ulps covers the rounding of node formulas such
/// as `a + k(b-a)/n` while leaving generic irrationals unmatched.
pub const RATIONAL_TOLERANCE: f64 = 16.0 * f64::EPSILON;

/// First continued-fraction convergent `p/q` of `x` with `q ≤ max_den` and
/// `|x - p/q| < tol · max(1, |x|)`, in lowest terms with `q > 0`.
pub fn rational_approximation(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let max_den = max_den as f64;
    let tol = tol * x.abs().max(1.0);
    let (mut h1, mut h2) = (1.0_f64, 0.0_f64);
    let (mut k1, mut k2) = (0.0_f64, 1.0_f64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        let h = a * h1 + h2;
        let k = a * k1 + k2;
        if k > max_den || !h.is_finite() {
            return None;
        }
        if (x - h / k).abs() < tol {
            return Some((h as i64, k as i64));
        }
        let frac = y - a;
        if frac <= 0.0 {
            return None;
        }
        y = 1.0 / frac;
        (h2, h1) = (h1, h);
        (k2, k1) = (k1, k);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn detect(x: f64) -> Option<(i64, i64)> {
        rational_approximation(x, RATIONAL_MAX_DENOMINATOR, RATIONAL_TOLERANCE)
    }

    #[test]
    fn simple_fractions() {
        assert_eq!(detect(0.5), Some((1, 2)));
        assert_eq!(detect(-0.75), Some((-3, 4)));
        assert_eq!(detect(3.0), Some((3, 1)));
        assert_eq!(detect(1.0 / 3.0), Some((1, 3)));
        assert_eq!(detect(22.0 / 7.0), Some((22, 7)));
        assert_eq!(detect(5.0 / 12.0), Some((5, 12)));
    }

    #[test]
    fn irrationals_rejected() {
        assert_eq!(detect(std::f64::consts::SQRT_2), None);
        assert_eq!(detect(std::f64::consts::PI), None);
        assert_eq!(detect(std::f64::consts::E), None);
        assert_eq!(detect(f64::NAN), None);
    }

    #[test]
    fn large_denominators() {
        assert_eq!(detect(123_457.0 / 999_983.0), Some((123_457, 999_983)));
        assert_eq!(detect(1.0 / 1_000_003.0), None);
    }

    proptest::proptest! {
        #[test]
        fn recovers_reduced_fractions(p in -5000i64..5000, q in 1i64..5000) {
            let g = gcd(p.abs(), q);
            let (p, q) = (p / g, q / g);
            proptest::prop_assert_eq!(detect(p as f64 / q as f64), Some((p, q)));
        }
    }

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 { a.max(1) } else { gcd(b, a % b) }
    }
}
