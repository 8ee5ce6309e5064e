//! Stopping-time rules for choosing the tuning parameter `λ`.
//!
//! Every rule returns `κ <= λ < 1` and reports `π̂₀*(λ)` as the estimate used
//! for thresholding, whatever variant it compared candidates with.
//!
//! Rule spec strings (used by the CLI and procedure ids):
//!
//! | spec              | rule                                                        |
//! |-------------------|-------------------------------------------------------------|
//! | `fixed:<λ>`       | fixed `λ`                                                   |
//! | `rb:<grid>`       | right-boundary on `grid`, comparing with `π̂₀`               |
//! | `rb+:<grid>`      | right-boundary on `grid`, comparing with `π̂₀*`              |
//! | `rb20`            | `rb:0.05:0.05:0.95`                                         |
//! | `lsl`             | lowest-slope, restricted to `p_(i) >= κ`                    |
//! | `kq:<k>`          | `λ = p_(k)`; `kq:median` uses `k = ⌊m/2⌋`                   |
//! | `rbq:<levels>`    | right-boundary on the p-value quantiles at `levels`         |
//! | `rbq+:<levels>`   | as `rbq`, comparing with `π̂₀*`                              |
//! | `rb20q`           | `rbq:0.05:0.05:0.95`                                        |
//!
//! A `<grid>` is either `start:step:stop` or a `/`-separated list such as
//! `0.1/0.5/0.9`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{FdrError, Result};
use crate::estimators::{pi0_from_count, Pi0Estimate, Pi0Variant, SelectionNote, TracePoint};
use crate::pvalues::EmpiricalProcesses;

pub const VALID_RULE_SPECS: &str =
    "fixed:<lambda>, rb:<grid>, rb+:<grid>, rb20, lsl, kq:<k|median>, rbq:<levels>, rbq+:<levels>, rb20q";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KChoice {
    Index(usize),
    /// `k = ⌊m/2⌋` (at least 1).
    Median,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RuleKind {
    Fixed(f64),
    RightBoundary {
        grid: Vec<f64>,
        comparison: Pi0Variant,
    },
    LowestSlope,
    KQuantile(KChoice),
    RightBoundaryQuantile {
        levels: Vec<f64>,
        comparison: Pi0Variant,
    },
}

/// A selection rule bound to the left end `κ` of the estimation region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaRule {
    pub kind: RuleKind,
    pub kappa: f64,
}

impl LambdaRule {
    pub fn new(kind: RuleKind, kappa: f64) -> Self {
        Self { kind, kappa }
    }
}

/// `{0.05, 0.10, ..., 0.95}`: the 20-bin histogram grid.
pub fn twenty_bin_grid() -> Vec<f64> {
    arithmetic_grid(0.05, 0.05, 0.95).expect("constant grid")
}

fn arithmetic_grid(start: f64, step: f64, stop: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(FdrError::config(format!(
            "bad grid range {start}:{step}:{stop}"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    // snap to 12 decimals so 0.05 * 3 prints and compares as 0.15
    Ok((0..n)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

fn validate_unit_grid(what: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(FdrError::config(format!("{what} is empty")));
    }
    if let Some(&x) = grid.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
        return Err(FdrError::config(format!(
            "{what} value {x} is outside (0, 1)"
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FdrError::config(format!(
            "{what} must be strictly ascending"
        )));
    }
    Ok(())
}

fn validate_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa < 1.0 {
        Ok(())
    } else {
        Err(FdrError::Domain {
            name: "kappa",
            value: kappa,
            domain: "(0, 1)",
        })
    }
}

fn pi0_at(proc: &EmpiricalProcesses, lambda: f64, variant: Pi0Variant) -> f64 {
    pi0_from_count(proc.m(), proc.sorted().count_le(lambda), lambda, variant)
}

fn finish(
    proc: &EmpiricalProcesses,
    lambda: f64,
    comparison: Pi0Variant,
    trace: Vec<TracePoint>,
    notes: Vec<SelectionNote>,
) -> Pi0Estimate {
    debug_assert!(lambda < 1.0);
    Pi0Estimate {
        lambda,
        variant: Pi0Variant::StoreyPlusOne,
        value: pi0_at(proc, lambda, Pi0Variant::StoreyPlusOne),
        comparison,
        trace,
        notes,
    }
}

pub fn select_fixed(proc: &EmpiricalProcesses, lambda: f64, kappa: f64) -> Result<Pi0Estimate> {
    validate_kappa(kappa)?;
    if !(lambda >= kappa && lambda < 1.0) {
        return Err(FdrError::config(format!(
            "fixed lambda {lambda} must lie in [kappa, 1) with kappa = {kappa}"
        )));
    }
    let value = pi0_at(proc, lambda, Pi0Variant::StoreyPlusOne);
    Ok(finish(
        proc,
        lambda,
        Pi0Variant::StoreyPlusOne,
        vec![TracePoint { lambda, pi0: value }],
        Vec::new(),
    ))
}

/// Right-boundary rule: stop at the first `λ_i >= κ` whose estimate is no
/// smaller than the estimate at the previous boundary (`λ₀ = 0`); otherwise
/// take the last grid point.
pub fn select_right_boundary(
    proc: &EmpiricalProcesses,
    grid: &[f64],
    kappa: f64,
    comparison: Pi0Variant,
) -> Result<Pi0Estimate> {
    validate_kappa(kappa)?;
    validate_unit_grid("right-boundary grid", grid)?;
    Ok(right_boundary_unchecked(proc, grid, kappa, comparison))
}

fn right_boundary_unchecked(
    proc: &EmpiricalProcesses,
    grid: &[f64],
    kappa: f64,
    comparison: Pi0Variant,
) -> Pi0Estimate {
    let mut prev = pi0_at(proc, 0.0, comparison);
    let mut trace = Vec::with_capacity(grid.len() + 1);
    trace.push(TracePoint {
        lambda: 0.0,
        pi0: prev,
    });
    for &lambda in grid {
        let cur = pi0_at(proc, lambda, comparison);
        trace.push(TracePoint { lambda, pi0: cur });
        if lambda >= kappa && cur >= prev {
            return finish(proc, lambda, comparison, trace, Vec::new());
        }
        prev = cur;
    }
    let last = *grid.last().expect("non-empty grid");
    let mut notes = vec![SelectionNote::NoStop];
    let lambda = if last < kappa {
        notes.push(SelectionNote::LowerClamp);
        kappa
    } else {
        last
    };
    finish(proc, lambda, comparison, trace, notes)
}

/// Lowest-slope rule on the order statistics: stop at the first
/// `p_(i) >= κ` (`i >= 2`) with `π̂₀*(p_(i)) > π̂₀*(p_(i−1))`. Without a stop,
/// fall back to the largest `p_(i) < 1` that is `>= κ`, else `κ`.
pub fn select_lowest_slope(proc: &EmpiricalProcesses, kappa: f64) -> Result<Pi0Estimate> {
    validate_kappa(kappa)?;
    let m = proc.m();
    if m < 2 {
        return Err(FdrError::config("lowest-slope needs at least 2 p-values"));
    }
    let ordered = proc.sorted().ordered();
    let star = Pi0Variant::StoreyPlusOne;
    let mut trace = Vec::new();

    if ordered[0] < 1.0 {
        let mut prev = pi0_at(proc, ordered[0], star);
        trace.push(TracePoint {
            lambda: ordered[0],
            pi0: prev,
        });
        for &p in &ordered[1..] {
            if p >= 1.0 {
                break;
            }
            let cur = pi0_at(proc, p, star);
            trace.push(TracePoint {
                lambda: p,
                pi0: cur,
            });
            if p >= kappa && cur > prev {
                return Ok(finish(proc, p, star, trace, Vec::new()));
            }
            prev = cur;
        }
    }

    let fallback = ordered
        .iter()
        .rev()
        .find(|&&p| p < 1.0)
        .copied()
        .filter(|&p| p >= kappa);
    let mut notes = vec![SelectionNote::NoStop];
    let lambda = fallback.unwrap_or_else(|| {
        notes.push(SelectionNote::LowerClamp);
        kappa
    });
    Ok(finish(proc, lambda, star, trace, notes))
}

/// `λ = p_(k)`, raised to `κ` if smaller and clamped below 1.
pub fn select_k_quantile(proc: &EmpiricalProcesses, k: KChoice, kappa: f64) -> Result<Pi0Estimate> {
    validate_kappa(kappa)?;
    let m = proc.m();
    let k = match k {
        KChoice::Median => (m / 2).max(1),
        KChoice::Index(k) if (1..=m).contains(&k) => k,
        KChoice::Index(k) => {
            return Err(FdrError::config(format!("k = {k} is outside 1..={m}")));
        }
    };
    let mut notes = Vec::new();
    let mut lambda = proc.sorted().order_stat(k);
    if lambda < kappa {
        lambda = kappa;
        notes.push(SelectionNote::LowerClamp);
    }
    if lambda >= 1.0 {
        lambda = upper_clamp(kappa, m);
        notes.push(SelectionNote::UpperClamp);
    }
    let value = pi0_at(proc, lambda, Pi0Variant::StoreyPlusOne);
    Ok(finish(
        proc,
        lambda,
        Pi0Variant::StoreyPlusOne,
        vec![TracePoint { lambda, pi0: value }],
        notes,
    ))
}

fn upper_clamp(kappa: f64, m: usize) -> f64 {
    kappa.max(1.0 - 1.0 / m as f64)
}

/// 1-based rank `⌈γ m⌉`, tolerant of `γ m` landing a hair above an integer.
fn quantile_rank(level: f64, m: usize) -> usize {
    let x = level * m as f64;
    let r = if (x - x.round()).abs() < 1e-9 {
        x.round()
    } else {
        x.ceil()
    };
    (r as usize).clamp(1, m)
}

/// Candidate grid `q_γ = p_(⌈γ m⌉)` for each level, deduplicated, with
/// entries below `κ` or at 1 removed.
pub fn quantile_grid(proc: &EmpiricalProcesses, levels: &[f64], kappa: f64) -> Vec<f64> {
    let sorted = proc.sorted();
    let mut grid: Vec<f64> = levels
        .iter()
        .map(|&g| sorted.order_stat(quantile_rank(g, proc.m())))
        .collect();
    grid.dedup();
    grid.retain(|&q| q >= kappa && q < 1.0);
    grid
}

pub fn select_right_boundary_quantile(
    proc: &EmpiricalProcesses,
    levels: &[f64],
    kappa: f64,
    comparison: Pi0Variant,
) -> Result<Pi0Estimate> {
    validate_kappa(kappa)?;
    validate_unit_grid("quantile levels", levels)?;
    let grid = quantile_grid(proc, levels, kappa);
    if grid.is_empty() {
        let value = pi0_at(proc, kappa, Pi0Variant::StoreyPlusOne);
        return Ok(finish(
            proc,
            kappa,
            comparison,
            vec![TracePoint {
                lambda: kappa,
                pi0: value,
            }],
            vec![SelectionNote::EmptyGrid],
        ));
    }
    Ok(right_boundary_unchecked(proc, &grid, kappa, comparison))
}

pub fn select_lambda(proc: &EmpiricalProcesses, rule: &LambdaRule) -> Result<Pi0Estimate> {
    let kappa = rule.kappa;
    match &rule.kind {
        RuleKind::Fixed(lambda) => select_fixed(proc, *lambda, kappa),
        RuleKind::RightBoundary { grid, comparison } => {
            select_right_boundary(proc, grid, kappa, *comparison)
        }
        RuleKind::LowestSlope => select_lowest_slope(proc, kappa),
        RuleKind::KQuantile(k) => select_k_quantile(proc, *k, kappa),
        RuleKind::RightBoundaryQuantile { levels, comparison } => {
            select_right_boundary_quantile(proc, levels, kappa, *comparison)
        }
    }
}

fn parse_f64(s: &str, spec: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| FdrError::UnknownSpec {
        spec: spec.to_string(),
        valid: VALID_RULE_SPECS,
    })
}

fn parse_grid(body: &str, spec: &str) -> Result<Vec<f64>> {
    let grid = if body.contains('/') {
        body.split('/')
            .map(|x| parse_f64(x, spec))
            .collect::<Result<Vec<_>>>()?
    } else {
        let parts: Vec<&str> = body.split(':').collect();
        match parts.as_slice() {
            [x] => vec![parse_f64(x, spec)?],
            [a, s, b] => arithmetic_grid(
                parse_f64(a, spec)?,
                parse_f64(s, spec)?,
                parse_f64(b, spec)?,
            )?,
            _ => {
                return Err(FdrError::UnknownSpec {
                    spec: spec.to_string(),
                    valid: VALID_RULE_SPECS,
                })
            }
        }
    };
    validate_unit_grid("grid", &grid)?;
    Ok(grid)
}

impl FromStr for RuleKind {
    type Err = FdrError;

    fn from_str(s: &str) -> Result<Self> {
        let spec = s.trim();
        let unknown = || FdrError::UnknownSpec {
            spec: spec.to_string(),
            valid: VALID_RULE_SPECS,
        };
        let (head, body) = match spec.split_once(':') {
            Some((h, b)) => (h, Some(b)),
            None => (spec, None),
        };
        let kind = match (head.to_ascii_lowercase().as_str(), body) {
            ("rb20", None) => RuleKind::RightBoundary {
                grid: twenty_bin_grid(),
                comparison: Pi0Variant::Storey,
            },
            ("rb20q", None) => RuleKind::RightBoundaryQuantile {
                levels: twenty_bin_grid(),
                comparison: Pi0Variant::Storey,
            },
            ("lsl", None) => RuleKind::LowestSlope,
            ("fixed", Some(b)) => RuleKind::Fixed(parse_f64(b, spec)?),
            ("rb", Some(b)) => RuleKind::RightBoundary {
                grid: parse_grid(b, spec)?,
                comparison: Pi0Variant::Storey,
            },
            ("rb+", Some(b)) => RuleKind::RightBoundary {
                grid: parse_grid(b, spec)?,
                comparison: Pi0Variant::StoreyPlusOne,
            },
            ("rbq", Some(b)) => RuleKind::RightBoundaryQuantile {
                levels: parse_grid(b, spec)?,
                comparison: Pi0Variant::Storey,
            },
            ("rbq+", Some(b)) => RuleKind::RightBoundaryQuantile {
                levels: parse_grid(b, spec)?,
                comparison: Pi0Variant::StoreyPlusOne,
            },
            ("kq", Some(b)) if b.trim().eq_ignore_ascii_case("median") => {
                RuleKind::KQuantile(KChoice::Median)
            }
            ("kq", Some(b)) => {
                RuleKind::KQuantile(KChoice::Index(b.trim().parse().map_err(|_| unknown())?))
            }
            _ => return Err(unknown()),
        };
        Ok(kind)
    }
}

fn join_grid(grid: &[f64]) -> String {
    grid.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("/")
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let plus = |c: &Pi0Variant| {
            if *c == Pi0Variant::StoreyPlusOne {
                "+"
            } else {
                ""
            }
        };
        match self {
            RuleKind::Fixed(l) => write!(f, "fixed:{l}"),
            RuleKind::RightBoundary { grid, comparison } => {
                write!(f, "rb{}:{}", plus(comparison), join_grid(grid))
            }
            RuleKind::LowestSlope => f.write_str("lsl"),
            RuleKind::KQuantile(KChoice::Median) => f.write_str("kq:median"),
            RuleKind::KQuantile(KChoice::Index(k)) => write!(f, "kq:{k}"),
            RuleKind::RightBoundaryQuantile { levels, comparison } => {
                write!(f, "rbq{}:{}", plus(comparison), join_grid(levels))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{pi0_estimate, pi0_storey_plus};
    use crate::pvalues::PValueSample;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn procs(values: &[f64]) -> EmpiricalProcesses {
        EmpiricalProcesses::new(&PValueSample::new(values.to_vec()).unwrap())
    }

    const EIGHT: [f64; 8] = [0.01, 0.02, 0.03, 0.3, 0.4, 0.6, 0.8, 0.9];
    const STAR: Pi0Variant = Pi0Variant::StoreyPlusOne;

    #[test]
    fn fixed_rule() {
        let p = procs(&EIGHT);
        let est = select_fixed(&p, 0.5, 0.05).unwrap();
        assert_eq!(est.lambda, 0.5);
        assert_relative_eq!(est.value, pi0_storey_plus(&p, 0.5).unwrap());
        assert_eq!(select_fixed(&p, 0.95, 0.05).unwrap().lambda, 0.95);
        assert!(select_fixed(&p, 0.02, 0.05).is_err());
        assert!(select_fixed(&p, 1.0, 0.05).is_err());
    }

    #[test]
    fn right_boundary_hand_example() {
        let p = procs(&EIGHT);
        let est = select_right_boundary(&p, &[0.25, 0.5, 0.75], 0.05, STAR).unwrap();
        assert_eq!(est.lambda, 0.5);
        assert_relative_eq!(est.value, 1.0, epsilon = 1e-15);
        let trace: Vec<f64> = est.trace.iter().map(|t| t.pi0).collect();
        assert_relative_eq!(trace[0], 1.125, epsilon = 1e-15);
        assert_relative_eq!(trace[1], 1.0, epsilon = 1e-15);
        assert_relative_eq!(trace[2], 1.0, epsilon = 1e-15);
        assert_eq!(trace.len(), 3);
        assert!(est.notes.is_empty());
    }

    #[test]
    fn right_boundary_stops_at_first_candidate() {
        let p = procs(&[0.99; 4]);
        let est = select_right_boundary(&p, &[0.25, 0.5], 0.05, STAR).unwrap();
        assert_eq!(est.lambda, 0.25);
        assert_relative_eq!(est.trace[0].pi0, 1.25, epsilon = 1e-15);
        assert_relative_eq!(est.trace[1].pi0, 5.0 / 3.0, epsilon = 1e-15);
    }

    // Brute-force search over bin counts (m = 20, values at bin midpoints)
    // for an instance whose estimate strictly decreases along the whole grid.
    #[test]
    fn right_boundary_falls_back_to_last_point() {
        let grid = [0.2, 0.4, 0.6];
        let mids = [0.1, 0.3, 0.5, 0.8];
        let m = 20;
        let mut found = None;
        'search: for c1 in 0..=m {
            for c2 in 0..=m - c1 {
                for c3 in 0..=m - c1 - c2 {
                    let counts = [c1, c2, c3, m - c1 - c2 - c3];
                    let values: Vec<f64> = counts
                        .iter()
                        .zip(mids)
                        .flat_map(|(&c, x)| std::iter::repeat_n(x, c))
                        .collect();
                    let p = procs(&values);
                    let mut prev = pi0_estimate(&p, 0.0, Pi0Variant::Storey).unwrap();
                    let decreasing = grid.iter().all(|&g| {
                        let cur = pi0_estimate(&p, g, Pi0Variant::Storey).unwrap();
                        let ok = cur < prev;
                        prev = cur;
                        ok
                    });
                    if decreasing {
                        found = Some(values);
                        break 'search;
                    }
                }
            }
        }
        let values = found.expect("a strictly decreasing instance exists");
        let est = select_right_boundary(&procs(&values), &grid, 0.05, Pi0Variant::Storey).unwrap();
        assert_eq!(est.lambda, 0.6);
        assert_eq!(est.notes, vec![SelectionNote::NoStop]);
    }

    #[test]
    fn right_boundary_skips_candidates_below_kappa() {
        // λ₁ = 0.02 would stop (estimate rises from λ₀), but it is below κ
        let p = procs(&[0.5, 0.6, 0.7, 0.8]);
        let est = select_right_boundary(&p, &[0.02, 0.5, 0.9], 0.05, STAR).unwrap();
        assert!(est.lambda >= 0.05);
        assert_eq!(est.lambda, 0.5);
    }

    #[test]
    fn right_boundary_rejects_bad_grids() {
        let p = procs(&EIGHT);
        assert!(select_right_boundary(&p, &[], 0.05, STAR).is_err());
        assert!(select_right_boundary(&p, &[0.5, 0.4], 0.05, STAR).is_err());
        assert!(select_right_boundary(&p, &[0.5, 1.0], 0.05, STAR).is_err());
    }

    #[test]
    fn lowest_slope_hand_examples() {
        let est = select_lowest_slope(&procs(&[0.1, 0.2, 0.7, 0.8]), 0.05).unwrap();
        assert_eq!(est.lambda, 0.7);
        assert_relative_eq!(est.trace[0].pi0, 4.0 / 3.6, epsilon = 1e-15);
        assert_relative_eq!(est.trace[1].pi0, 0.9375, epsilon = 1e-15);
        assert_relative_eq!(est.value, 2.0 / 1.2, epsilon = 1e-12);

        let est = select_lowest_slope(&procs(&[0.3, 0.6]), 0.05).unwrap();
        assert_eq!(est.lambda, 0.6);
        assert_eq!(est.notes, vec![SelectionNote::NoStop]);

        let est = select_lowest_slope(&procs(&[0.01, 0.02, 0.03]), 0.05).unwrap();
        assert_eq!(est.lambda, 0.05);

        assert!(select_lowest_slope(&procs(&[0.5]), 0.05).is_err());
    }

    #[test]
    fn lowest_slope_ignores_unit_pvalues() {
        let est = select_lowest_slope(&procs(&[0.3, 0.6, 1.0, 1.0]), 0.05).unwrap();
        assert!(est.lambda < 1.0);
        let est = select_lowest_slope(&procs(&[1.0, 1.0]), 0.05).unwrap();
        assert_eq!(est.lambda, 0.05);
    }

    #[test]
    fn k_quantile_examples() {
        let p = procs(&[0.9, 0.1, 0.4, 0.2, 0.6, 0.8, 0.3]);
        let est = select_k_quantile(&p, KChoice::Median, 0.05).unwrap();
        assert_eq!(est.lambda, 0.3);
        let est = select_k_quantile(&p, KChoice::Index(4), 0.05).unwrap();
        assert_eq!(est.lambda, 0.4);

        let p = procs(&[0.01, 0.5, 0.9]);
        let est = select_k_quantile(&p, KChoice::Index(1), 0.05).unwrap();
        assert_eq!(est.lambda, 0.05);

        let p = procs(&[0.2, 1.0, 1.0, 1.0]);
        let est = select_k_quantile(&p, KChoice::Index(3), 0.05).unwrap();
        assert_eq!(est.lambda, 0.75);
        assert_eq!(est.notes, vec![SelectionNote::UpperClamp]);

        assert!(select_k_quantile(&p, KChoice::Index(0), 0.05).is_err());
        assert!(select_k_quantile(&p, KChoice::Index(5), 0.05).is_err());
    }

    #[test]
    fn quantile_grid_index_arithmetic() {
        let values: Vec<f64> = (1..=20).map(|i| i as f64 / 21.0).collect();
        let p = procs(&values);
        let grid = quantile_grid(&p, &[0.25, 0.5, 0.75], 0.01);
        assert_eq!(grid, vec![5.0 / 21.0, 10.0 / 21.0, 15.0 / 21.0]);
        // 0.15 * 20 is 3.0000000000000004 in floating point
        assert_eq!(quantile_rank(0.15, 20), 3);
        assert_eq!(quantile_rank(0.05, 10), 1);
        assert_eq!(quantile_rank(0.01, 10), 1);
    }

    #[test]
    fn rbq_delegates_to_right_boundary() {
        // levels 0.5, 0.75 -> ranks 4, 6 -> 0.45, 0.65; π̂₀*(0.45) = 5/4.4
        // already exceeds π̂₀*(0) = 9/8
        let p = procs(&[0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85]);
        let est = select_right_boundary_quantile(&p, &[0.5, 0.75], 0.05, STAR).unwrap();
        assert_eq!(est.lambda, 0.45);
        let direct = select_right_boundary(&p, &[0.45, 0.65], 0.05, STAR).unwrap();
        assert_eq!(est, direct);

        // 3/8, 5/8, 7/8 -> 0.03 (dropped, below κ), 0.4, 0.8
        let p = procs(&EIGHT);
        assert_eq!(
            quantile_grid(&p, &[0.375, 0.625, 0.875], 0.05),
            vec![0.4, 0.8]
        );
        let est = select_right_boundary_quantile(&p, &[0.375, 0.625, 0.875], 0.05, STAR).unwrap();
        assert_eq!(est.lambda, 0.8);
    }

    #[test]
    fn rbq_empty_grid_falls_back_to_kappa() {
        let p = procs(&[0.001, 0.002, 0.003]);
        let est = select_right_boundary_quantile(&p, &twenty_bin_grid(), 0.05, STAR).unwrap();
        assert_eq!(est.lambda, 0.05);
        assert_eq!(est.notes, vec![SelectionNote::EmptyGrid]);
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in [
            "fixed:0.5",
            "rb:0.1/0.5/0.9",
            "rb+:0.25/0.5",
            "lsl",
            "kq:median",
            "kq:7",
            "rbq:0.25/0.5/0.75",
            "rbq+:0.5",
        ] {
            let kind: RuleKind = s.parse().unwrap();
            assert_eq!(kind.to_string(), s);
        }
        let rb20: RuleKind = "rb20".parse().unwrap();
        assert_eq!(rb20, "rb:0.05:0.05:0.95".parse().unwrap());
        match rb20 {
            RuleKind::RightBoundary { grid, comparison } => {
                assert_eq!(grid.len(), 19);
                assert_eq!(grid[2], 0.15);
                assert_eq!(grid[18], 0.95);
                assert_eq!(comparison, Pi0Variant::Storey);
            }
            _ => unreachable!(),
        }
        for bad in ["", "rb", "fixed", "kq:x", "bogus", "rb:0.5/0.4", "rb:1:2"] {
            assert!(bad.parse::<RuleKind>().is_err(), "{bad}");
        }
    }

    fn sample_in_unit() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0001f64..0.9999, 2..150)
    }

    fn replace_above(values: &[f64], lambda: f64, seeds: &[f64]) -> Vec<f64> {
        values
            .iter()
            .zip(seeds.iter().cycle())
            .map(|(&v, &u)| {
                if v > lambda {
                    lambda + (1.0 - lambda) * u
                } else {
                    v
                }
            })
            .map(|v| v.min(0.99999))
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn right_boundary_is_a_stopping_time(
            values in sample_in_unit(),
            seeds in prop::collection::vec(0.001f64..0.999, 1..50),
            variant in prop_oneof![Just(Pi0Variant::Storey), Just(STAR)],
        ) {
            let grid = twenty_bin_grid();
            let est = select_right_boundary(&procs(&values), &grid, 0.05, variant).unwrap();
            let moved = replace_above(&values, est.lambda, &seeds);
            let again = select_right_boundary(&procs(&moved), &grid, 0.05, variant).unwrap();
            prop_assert_eq!(est.lambda, again.lambda);
        }

        #[test]
        fn lowest_slope_is_a_stopping_time(
            values in sample_in_unit(),
            seeds in prop::collection::vec(0.001f64..0.999, 1..50),
        ) {
            let est = select_lowest_slope(&procs(&values), 0.05).unwrap();
            let moved = replace_above(&values, est.lambda, &seeds);
            let again = select_lowest_slope(&procs(&moved), 0.05).unwrap();
            prop_assert_eq!(est.lambda, again.lambda);
        }

        #[test]
        fn every_rule_returns_lambda_in_range(
            values in prop::collection::vec(prop_oneof![0.0f64..=1.0, Just(1.0), Just(0.0)], 2..100),
            kappa in 0.01f64..0.5,
        ) {
            let p = procs(&values);
            let rules = [
                RuleKind::Fixed(0.5),
                "rb20".parse().unwrap(),
                "rb+:0.05:0.05:0.95".parse().unwrap(),
                RuleKind::LowestSlope,
                RuleKind::KQuantile(KChoice::Median),
                RuleKind::KQuantile(KChoice::Index(values.len())),
                "rb20q".parse().unwrap(),
            ];
            for kind in rules {
                let est = select_lambda(&p, &LambdaRule::new(kind, kappa)).unwrap();
                prop_assert!(est.lambda >= kappa && est.lambda < 1.0);
                prop_assert!(est.value > 0.0 && est.value.is_finite());
            }
        }

        #[test]
        fn singleton_grid_equals_fixed(values in sample_in_unit(), point in 0.05f64..0.99) {
            let p = procs(&values);
            let rb = select_right_boundary(&p, &[point], 0.05, Pi0Variant::Storey).unwrap();
            let fixed = select_fixed(&p, point, 0.05).unwrap();
            prop_assert_eq!(rb.lambda, fixed.lambda);
            prop_assert_eq!(rb.value, fixed.value);
        }

        #[test]
        fn quantile_grid_is_strictly_ascending(values in sample_in_unit()) {
            let grid = quantile_grid(&procs(&values), &twenty_bin_grid(), 0.05);
            prop_assert!(grid.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(grid.iter().all(|&q| (0.05..1.0).contains(&q)));
        }
    }
}
