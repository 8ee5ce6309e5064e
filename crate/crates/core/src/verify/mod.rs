//! Empirical checks of the inequalities behind finite-sample FDR control.
//!
//! Every check produces [`Report`] rows comparing a statistic with a bound at
//! an explicit tolerance. Monte Carlo checks use `3 · SE`; the binomial check
//! is exact up to floating-point rounding.

mod reference;
mod report;

use std::str::FromStr;

use rand::Rng;

use crate::error::{FdrError, Result};
use crate::procedures::{ProcedureKind, ProcedureSpec};
use crate::simulate::normal::normal_cdf;
use crate::simulate::{
    replicate, substream, Dependence, McEstimate, ProcedureOutcome, ScenarioConfig,
};

pub use reference::reference_normal_cdf;
use reference::CompensatedSum;
pub use report::{write_reports_csv, CheckRow, Relation, Report};

/// Largest `n` for which the binomial check sums exactly.
pub const BINOMIAL_MAX_N: u32 = 60;

/// `E[1 / (n − X + 1)]` for `X ~ Bin(n, p)` by direct summation.
pub fn inverse_binomial_expectation(n: u32, p: f64) -> f64 {
    let mut acc = CompensatedSum::default();
    let mut binom = 1.0f64;
    for x in 0..=n {
        if x > 0 {
            binom = binom * f64::from(n - x + 1) / f64::from(x);
        }
        let pmf = binom * p.powi(x as i32) * (1.0 - p).powi((n - x) as i32);
        acc.add(pmf / f64::from(n - x + 1));
    }
    acc.value()
}

/// `1 / ((n + 1)(1 − p))`.
pub fn inverse_binomial_bound(n: u32, p: f64) -> f64 {
    1.0 / (f64::from(n + 1) * (1.0 - p))
}

pub fn binomial_bound_check(n_max: u32, p_grid: &[f64]) -> Result<Report> {
    if n_max > BINOMIAL_MAX_N {
        return Err(FdrError::config(format!(
            "n_max = {n_max} exceeds {BINOMIAL_MAX_N}"
        )));
    }
    if let Some(&p) = p_grid.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
        return Err(FdrError::config(format!("p = {p} is outside (0, 1)")));
    }
    let mut report = Report::new("lemma2");
    for n in 0..=n_max {
        for &p in p_grid {
            report.push(CheckRow::at_most(
                format!("E[1/(n-X+1)] n={n} p={p}"),
                inverse_binomial_expectation(n, p),
                inverse_binomial_bound(n, p),
                1e-12,
            ));
        }
    }
    Ok(report)
}

/// `M(t) = (1 − t) / (m₀ − V(t) + 1)`.
fn null_martingale(m0: usize, t: f64, v: usize) -> f64 {
    (1.0 - t) / (m0 - v + 1) as f64
}

/// Minimum draws in a `V(s)` stratum for it to be checked.
pub const MIN_STRATUM_DRAWS: usize = 30;

/// Monte Carlo check that `E[M(t) | V(s)] <= M(s)` for `m₀` uniform nulls.
///
/// Draws are grouped by the observed `V(s)`; each stratum with at least
/// [`MIN_STRATUM_DRAWS`] draws is checked at `3 · SE` plus `1e-12` for
/// rounding in the mean. Also checks `M(1) = 0`.
pub fn supermartingale_check(m0: usize, s: f64, t: f64, draws: usize, seed: u64) -> Result<Report> {
    if !(0.0 <= s && s <= t && t <= 1.0) {
        return Err(FdrError::config(format!(
            "need 0 <= s <= t <= 1, got s = {s}, t = {t}"
        )));
    }
    if m0 == 0 || draws == 0 {
        return Err(FdrError::config("m0 and draws must be at least 1"));
    }
    let mut rng = substream(seed, 0);
    let mut strata: Vec<Vec<f64>> = vec![Vec::new(); m0 + 1];
    let mut terminal = 0.0f64;
    for _ in 0..draws {
        let (mut vs, mut vt) = (0, 0);
        for _ in 0..m0 {
            let u: f64 = rng.random();
            vs += usize::from(u <= s);
            vt += usize::from(u <= t);
        }
        strata[vs].push(null_martingale(m0, t, vt));
        terminal = terminal.max(null_martingale(m0, 1.0, m0).abs());
    }

    let tag = format!("m0={m0} s={s} t={t}");
    let mut report = Report::new("supermartingale");
    for (v, values) in strata.iter().enumerate() {
        if values.is_empty() {
            continue;
        }
        if values.len() < MIN_STRATUM_DRAWS {
            report
                .skipped
                .push(format!("{tag} V(s)={v}: {} draws", values.len()));
            continue;
        }
        let est = McEstimate::from_samples(values.iter().copied());
        report.push(CheckRow::at_most(
            format!("E[M(t)|V(s)] {tag} V(s)={v} n={}", values.len()),
            est.value,
            null_martingale(m0, s, v),
            3.0 * est.se + 1e-12,
        ));
    }
    report.push(CheckRow::within(format!("M(1) {tag}"), terminal, 0.0, 0.0));
    Ok(report)
}

fn column(
    outcomes: &[Vec<ProcedureOutcome>],
    k: usize,
    f: impl Fn(&ProcedureOutcome) -> f64,
) -> McEstimate {
    McEstimate::from_samples(outcomes.iter().map(|o| f(&o[k])))
}

/// Realized FDR against `α` for every procedure, plus:
/// - independent nulls: BH within `3 · SE` of `π₀ α`, the oracle within
///   `3 · SE` of `α`;
/// - independent nulls, adaptive procedures: `FDR <= (α/κ) E[V(κ) / (m π̂₀*)]`
///   (paired, `3 · SE`) and that bound `<= α`.
pub fn fdr_control_check(cfg: &ScenarioConfig, procedures: &[ProcedureSpec]) -> Result<Report> {
    let outcomes = replicate(cfg, procedures)?;
    let alpha = cfg.alpha;
    let independent = cfg.dependence == Dependence::Independent;
    let pi0 = cfg.m0() as f64 / cfg.m as f64;
    let scenario = cfg.label();
    let mut report = Report::new("fdr-control");

    for (k, spec) in procedures.iter().enumerate() {
        let fdr = column(&outcomes, k, |o| o.fdp);
        let name = format!("{scenario} {}", spec.label);
        report.push(CheckRow::at_most(
            format!("FDR {name}"),
            fdr.value,
            alpha,
            3.0 * fdr.se,
        ));
        if !independent {
            continue;
        }
        match spec.kind {
            ProcedureKind::Bh => report.push(CheckRow::within(
                format!("FDR = pi0*alpha {name}"),
                fdr.value,
                pi0 * alpha,
                3.0 * fdr.se,
            )),
            ProcedureKind::Oracle => report.push(CheckRow::within(
                format!("FDR = alpha {name}"),
                fdr.value,
                alpha,
                3.0 * fdr.se,
            )),
            ProcedureKind::Adaptive(_) => {
                let gap = column(&outcomes, k, |o| o.fdp - o.ratio_bound_term);
                report.push(CheckRow::at_most(
                    format!("FDR - ratio bound {name}"),
                    gap.value,
                    0.0,
                    3.0 * gap.se,
                ));
                let bound = column(&outcomes, k, |o| o.ratio_bound_term);
                report.push(CheckRow::at_most(
                    format!("ratio bound {name}"),
                    bound.value,
                    alpha,
                    3.0 * bound.se,
                ));
            }
        }
    }
    Ok(report)
}

/// Mean `π̂₀*(λ) >= π₀ − 3 · SE` for every adaptive procedure.
pub fn conservative_estimation_check(
    cfg: &ScenarioConfig,
    procedures: &[ProcedureSpec],
) -> Result<Report> {
    let adaptive: Vec<ProcedureSpec> = procedures
        .iter()
        .filter(|p| p.is_adaptive())
        .cloned()
        .collect();
    if adaptive.is_empty() {
        return Err(FdrError::config("no adaptive procedures to check"));
    }
    let outcomes = replicate(cfg, &adaptive)?;
    let pi0 = cfg.m0() as f64 / cfg.m as f64;
    let mut report = Report::new("conservative");
    for (k, spec) in adaptive.iter().enumerate() {
        let est = column(&outcomes, k, |o| o.pi0);
        report.push(CheckRow::at_least(
            format!("mean pi0* {} {}", cfg.label(), spec.label),
            est.value,
            pi0,
            3.0 * est.se,
        ));
    }
    Ok(report)
}

/// Mean `π̂₀*` per adaptive procedure on a shared set of replications.
pub fn mean_pi0(cfg: &ScenarioConfig, procedures: &[ProcedureSpec]) -> Result<Vec<McEstimate>> {
    let outcomes = replicate(cfg, procedures)?;
    Ok((0..procedures.len())
        .map(|k| column(&outcomes, k, |o| o.pi0))
        .collect())
}

/// Largest `|Φ(x) − Φ_ref(x)|` over `x = −8, −8 + step, ..., 8`.
pub fn normal_cdf_max_error(step: f64) -> f64 {
    let n = (16.0 / step).round() as usize;
    (0..=n)
        .map(|i| -8.0 + i as f64 * step)
        .map(|x| (normal_cdf(x) - reference_normal_cdf(x)).abs())
        .fold(0.0, f64::max)
}

pub fn normal_cdf_check() -> Report {
    let mut report = Report::new("normal-cdf");
    report.push(CheckRow::at_most(
        "max |Phi - Phi_ref| on [-8, 8]",
        normal_cdf_max_error(1e-3),
        1e-12,
        0.0,
    ));
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemma2,
    Supermartingale,
    FdrControl,
    Conservative,
    NormalCdf,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = [
        "lemma2",
        "supermartingale",
        "fdr-control",
        "conservative",
        "normal-cdf",
        "all",
    ];
}

impl FromStr for Suite {
    type Err = FdrError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lemma2" => Suite::Lemma2,
            "supermartingale" => Suite::Supermartingale,
            "fdr-control" => Suite::FdrControl,
            "conservative" => Suite::Conservative,
            "normal-cdf" => Suite::NormalCdf,
            "all" => Suite::All,
            _ => {
                return Err(FdrError::config(format!(
                    "unknown suite `{s}`; expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

/// `{0.05, 0.10, ..., 0.95}`.
pub fn default_p_grid() -> Vec<f64> {
    (1..=19).map(|i| f64::from(i) / 20.0).collect()
}

/// Desk-scale study setting: m = 1000, π₀ = 0.8, J = 2000, α = κ = 0.05.
pub fn desk_scenario(mu: f64, dependence: Dependence, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        mu,
        dependence,
        seed,
        ..ScenarioConfig::default()
    }
}

pub const BLOCK_AR_STUDY: Dependence = Dependence::BlockAr {
    block_size: 50,
    rho: -0.9,
};

fn specs(list: &str) -> Vec<ProcedureSpec> {
    ProcedureSpec::parse_list(list).expect("built-in procedure list")
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<Report>> {
    let mut reports = Vec::new();
    let all = suite == Suite::All;

    if all || suite == Suite::Lemma2 {
        reports.push(binomial_bound_check(BINOMIAL_MAX_N, &default_p_grid())?);
    }

    if all || suite == Suite::Supermartingale {
        let mut merged = Report::new("supermartingale");
        for m0 in [10, 50] {
            for (s, t) in [(0.2, 0.6), (0.5, 0.9), (0.3, 1.0)] {
                let r = supermartingale_check(m0, s, t, 100_000, seed)?;
                merged.rows.extend(r.rows);
                merged.skipped.extend(r.skipped);
            }
        }
        reports.push(merged);
    }

    if all || suite == Suite::FdrControl {
        let mut merged = Report::new("fdr-control");
        for dependence in [Dependence::Independent, BLOCK_AR_STUDY] {
            for mu in [1.0, 2.0] {
                let cfg = desk_scenario(mu, dependence, seed);
                merged
                    .rows
                    .extend(fdr_control_check(&cfg, &ProcedureSpec::default_set())?.rows);
            }
        }
        reports.push(merged);
    }

    if all || suite == Suite::Conservative {
        let adaptive = specs("fixed:0.5,rb20,lsl,rb20q");
        let null_only = ScenarioConfig {
            pi0: 1.0,
            seed,
            ..ScenarioConfig::default()
        };
        let mut merged = conservative_estimation_check(&null_only, &adaptive)?;

        let weak = desk_scenario(1.0, Dependence::Independent, seed);
        let means = mean_pi0(&weak, &specs("lsl,rb20"))?;
        merged.push(CheckRow::at_least(
            format!("mean pi0* lsl - rb20 {}", weak.label()),
            means[0].value - means[1].value,
            0.0,
            0.0,
        ));

        let strong = ScenarioConfig {
            pi0: 0.5,
            mu: 4.0,
            seed,
            ..ScenarioConfig::default()
        };
        for (spec, est) in adaptive.iter().zip(mean_pi0(&strong, &adaptive)?) {
            let name = format!("{} {}", strong.label(), spec.label);
            merged.push(CheckRow::at_least(
                format!("mean pi0* lower {name}"),
                est.value,
                0.5,
                3.0 * est.se,
            ));
            merged.push(CheckRow::at_most(
                format!("mean pi0* upper {name}"),
                est.value,
                1.2,
                0.0,
            ));
        }
        reports.push(merged);
    }

    if all || suite == Suite::NormalCdf {
        reports.push(normal_cdf_check());
    }
    Ok(reports)
}
