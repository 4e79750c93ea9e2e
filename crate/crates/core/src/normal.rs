//! Standard normal density, distribution and quantile functions.
//!
//! The distribution function goes through `erfc`, which keeps full relative
//! precision in both tails. The quantile starts from `erfc_inv` and takes one
//! Halley step against the distribution function.

use libm::erfc;
use statrs::function::erf::erfc_inv;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
pub fn pdf(z: f64) -> f64 {
    if !z.is_finite() {
        return 0.0;
    }
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal distribution function.
pub fn cdf(z: f64) -> f64 {
    if z == f64::INFINITY {
        return 1.0;
    }
    if z == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal quantile, `p` in (0, 1).
pub fn quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let z = -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p);
    let r = (cdf(z) - p) / pdf(z);
    if !r.is_finite() {
        return z;
    }
    z - r / (1.0 + 0.5 * z * r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert!((cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((cdf(1.96) - 0.975_002_104_851_779_5).abs() < 1e-15);
        assert!((cdf(-1.0) - 0.158_655_253_931_457_07).abs() < 1e-15);
        assert!((cdf(-5.0) - 2.866_515_718_791_933e-7).abs() < 1e-20);
        assert!((pdf(0.0) - 0.398_942_280_401_432_7).abs() < 1e-16);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[1e-6, 0.0001, 0.1, 0.5, 0.9, 0.9999] {
            assert!((cdf(quantile(p)) - p).abs() < 1e-14 * p.max(1e-2), "{p}");
        }
    }
}
