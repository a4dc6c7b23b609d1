//! Smallest truncation at which spikes of height `ε` clear the background.
//!
//! With exponentially distributed background gaps of scaled mean `α·N^((α−1)/α)/N`,
//! the expected number of background gaps above `ε` is `N·exp(−ε·N^(1/α)/α)`.
//! The estimate is the `N` at which that count drops to one.

use crate::error::{Error, Result};

/// Larger root of `N·exp(−ε·N^(1/α)/α) = 1`, or `1` when the count never
/// exceeds one.
pub fn min_n_estimate(eps: f64, alpha: u32) -> Result<f64> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::domain(format!("ε = {eps} must be positive and finite")));
    }
    if alpha < 2 {
        return Err(Error::domain(format!("root order {alpha} must be at least 2")));
    }
    let a = alpha as f64;
    // in L = ln N: h(L) = L − (ε/α)·e^(L/α), concave, h(0) < 0
    let h = |l: f64| l - eps / a * (l / a).exp();
    let peak = a * (a * a / eps).ln();
    if peak <= 0.0 || h(peak) <= 0.0 {
        return Ok(1.0);
    }
    let mut lo = peak;
    let mut hi = peak.max(1.0) * 2.0;
    while h(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// `N·exp(−ε·N^(1/α)/α) − 1`.
pub fn min_n_residual(n: f64, eps: f64, alpha: u32) -> f64 {
    let a = alpha as f64;
    (n.ln() - eps / a * n.powf(1.0 / a)).exp() - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_eps_root() {
        let n = min_n_estimate(1.0, 3).unwrap();
        assert!((n - 29410.0).abs() / 29410.0 < 1e-3, "{n}");
        assert!(min_n_residual(n, 1.0, 3).abs() < 1e-9);
    }

    #[test]
    fn quoted_orders_of_magnitude() {
        let n = min_n_estimate(1.0 / 3.0, 3).unwrap();
        assert!(n > 1e6 && n < 1e7, "{n}");
        let n = min_n_estimate(1.0 / 12.0, 3).unwrap();
        assert!(n > 1e8 && n < 1e9, "{n}");
    }

    #[test]
    fn large_eps_tends_to_one() {
        assert_eq!(min_n_estimate(100.0, 3).unwrap(), 1.0);
        let near = min_n_estimate(2.9, 3).unwrap();
        assert!(near >= 1.0);
    }

    #[test]
    fn decreasing_in_eps() {
        let mut last = f64::INFINITY;
        for i in 1..40 {
            let n = min_n_estimate(i as f64 * 0.07, 3).unwrap();
            assert!(n <= last);
            last = n;
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(min_n_estimate(0.0, 3).is_err());
        assert!(min_n_estimate(f64::NAN, 3).is_err());
        assert!(min_n_estimate(1.0, 1).is_err());
    }
}
