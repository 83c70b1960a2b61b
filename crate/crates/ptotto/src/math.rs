//! Small numeric helpers shared across the crate.

/// Hyperbolic cotangent for positive arguments, stable over the full range.
///
/// Evaluated as `coth(x) = 1 + 2/(e^{2x} - 1)` using `exp_m1`, which keeps
/// full relative accuracy for tiny arguments (where `coth(x) ~ 1/x` would
/// otherwise suffer cancellation) and saturates to 1 for `x > 350` before
/// `e^{2x}` overflows.
pub fn coth(x: f64) -> f64 {
    debug_assert!(x > 0.0, "coth argument must be positive");
    if x > 350.0 {
        1.0
    } else {
        1.0 + 2.0 / f64::exp_m1(2.0 * x)
    }
}

/// `n` evenly spaced values covering `[start, stop]` inclusive. Requires
/// `n >= 2`.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    debug_assert!(n >= 2);
    let step = (stop - start) / (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                stop
            } else {
                start + i as f64 * step
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coth_matches_tanh_reciprocal() {
        for &x in &[0.01f64, 0.1, 0.5, 1.0, 3.0, 20.0, 100.0] {
            let reference = 1.0 / x.tanh();
            assert!((coth(x) - reference).abs() <= 1e-14 * reference);
        }
    }

    #[test]
    fn coth_tiny_argument_no_cancellation() {
        // coth(x) = 1/x + x/3 + O(x^3); naive (e^2x+1)/(e^2x-1) would lose
        // half the digits here
        for &x in &[1e-10f64, 1e-12, 1e-8] {
            let expected = 1.0 / x + x / 3.0;
            assert!((coth(x) - expected).abs() / expected < 1e-13);
        }
    }

    #[test]
    fn coth_saturates() {
        assert_eq!(coth(351.0), 1.0);
        assert_eq!(coth(1e6), 1.0);
    }

    #[test]
    fn linspace_endpoints_exact() {
        let v = linspace(0.05, 1.0, 200);
        assert_eq!(v.len(), 200);
        assert_eq!(v[0], 0.05);
        assert_eq!(v[199], 1.0);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }
}
