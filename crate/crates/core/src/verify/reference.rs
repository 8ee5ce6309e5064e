//! Reference standard normal CDF, independent of the `erfc` used by the
//! simulator: a Taylor series for `|x| < 3` and the Laplace continued
//! fraction for the tails, both with compensated accumulation.

use std::f64::consts::PI;

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum + self.carry
    }
}

fn density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `Φ(x) = 1/2 + φ(x) Σ_{n>=0} x^{2n+1} / (2n+1)!!`
fn series_cdf(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut acc = CompensatedSum::default();
    acc.add(term);
    let mut n = 0u32;
    while term.abs() > 1e-22 * acc.value().abs().max(1e-300) && n < 500 {
        n += 1;
        term *= x2 / f64::from(2 * n + 1);
        acc.add(term);
    }
    let mut total = CompensatedSum::default();
    total.add(0.5);
    total.add(density(x) * acc.value());
    total.value()
}

/// `1 − Φ(x)` for `x > 0` as `φ(x) / (x + 1/(x + 2/(x + 3/(x + ...))))`,
/// evaluated bottom-up from a fixed depth.
fn continued_fraction_tail(x: f64) -> f64 {
    const DEPTH: u32 = 600;
    let mut t = x;
    for k in (1..=DEPTH).rev() {
        t = x + f64::from(k) / t;
    }
    density(x) / t
}

pub fn reference_normal_cdf(x: f64) -> f64 {
    if x.abs() < 3.0 {
        series_cdf(x)
    } else if x > 0.0 {
        let mut acc = CompensatedSum::default();
        acc.add(1.0);
        acc.add(-continued_fraction_tail(x));
        acc.value()
    } else {
        continued_fraction_tail(-x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_values() {
        // Abramowitz & Stegun Table 26.1
        assert!((reference_normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((reference_normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
        assert!((reference_normal_cdf(-2.0) - 0.022_750_131_948_179_2).abs() < 1e-15);
        assert!((reference_normal_cdf(3.0) - 0.998_650_101_968_369_9).abs() < 1e-15);
        assert!((reference_normal_cdf(-5.0) - 2.866_515_718_791_939e-7).abs() < 1e-20);
    }

    #[test]
    fn branches_agree_at_the_seam() {
        for &x in &[2.9, 2.99, 3.0, 3.01] {
            let s = series_cdf(x);
            let c = 1.0 - continued_fraction_tail(x);
            assert!((s - c).abs() < 1e-14, "x = {x}: {s} vs {c}");
        }
    }
}
