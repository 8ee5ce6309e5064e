//! Standard normal distribution function.

use std::f64::consts::FRAC_1_SQRT_2;

/// `Φ(x)`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// `1 − Φ(x)`, computed without cancellation in the upper tail.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// One-sided p-value of `H₀: μ = 0` against `μ > 0` for statistic `x`.
pub fn one_sided_pvalue(x: f64) -> f64 {
    normal_sf(x)
}
