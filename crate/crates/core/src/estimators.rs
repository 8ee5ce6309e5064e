//! Storey-type `π₀` estimators and the `κ`-truncated FDR estimator.
//!
//! ```text
//! π̂₀(λ)  = (m − R(λ))     / ((1 − λ) m)
//! π̂₀*(λ) = (m − R(λ) + 1) / ((1 − λ) m)
//!
//! FDR̂*_λ(t) = m π̂₀* t / (R(t) ∨ 1)   for t <= κ
//!            = 1                      for t >  κ
//! ```
//!
//! Estimates above 1 are returned as computed; no clipping happens here.

use serde::Serialize;

use crate::error::{check_closed, FdrError, Result};
use crate::pvalues::EmpiricalProcesses;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Pi0Variant {
    /// `(m − R(λ)) / ((1 − λ) m)`
    Storey,
    /// `(m − R(λ) + 1) / ((1 − λ) m)`, bounded away from zero.
    StoreyPlusOne,
}

impl Pi0Variant {
    fn numerator_offset(self) -> f64 {
        match self {
            Pi0Variant::Storey => 0.0,
            Pi0Variant::StoreyPlusOne => 1.0,
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(FdrError::Domain {
            name: "lambda",
            value: lambda,
            domain: "[0, 1)",
        })
    }
}

/// `π₀` estimate at `lambda` from a count `R(λ)`; no domain checks.
pub(crate) fn pi0_from_count(m: usize, r_lambda: usize, lambda: f64, variant: Pi0Variant) -> f64 {
    let m = m as f64;
    (m - r_lambda as f64 + variant.numerator_offset()) / ((1.0 - lambda) * m)
}

pub fn pi0_estimate(proc: &EmpiricalProcesses, lambda: f64, variant: Pi0Variant) -> Result<f64> {
    check_lambda(lambda)?;
    let r = proc.sorted().count_le(lambda);
    Ok(pi0_from_count(proc.m(), r, lambda, variant))
}

pub fn pi0_storey(proc: &EmpiricalProcesses, lambda: f64) -> Result<f64> {
    pi0_estimate(proc, lambda, Pi0Variant::Storey)
}

pub fn pi0_storey_plus(proc: &EmpiricalProcesses, lambda: f64) -> Result<f64> {
    pi0_estimate(proc, lambda, Pi0Variant::StoreyPlusOne)
}

/// Target level `alpha` and the right end `kappa` of the rejection region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdrEstimatorConfig {
    pub kappa: f64,
    pub alpha: f64,
}

impl FdrEstimatorConfig {
    pub fn new(alpha: f64, kappa: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(FdrError::Domain {
                name: "alpha",
                value: alpha,
                domain: "(0, 1)",
            });
        }
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(FdrError::Domain {
                name: "kappa",
                value: kappa,
                domain: "(0, 1)",
            });
        }
        Ok(Self { kappa, alpha })
    }

    /// `κ = α`.
    pub fn with_alpha(alpha: f64) -> Result<Self> {
        Self::new(alpha, alpha)
    }
}

/// `FDR̂*_λ(t)` given `π̂₀*(λ)`.
pub fn fdr_hat_star(
    proc: &EmpiricalProcesses,
    pi0_star: f64,
    t: f64,
    cfg: &FdrEstimatorConfig,
) -> Result<f64> {
    check_closed("t", t, 0.0, 1.0, "[0, 1]")?;
    if pi0_star.is_nan() || pi0_star <= 0.0 {
        return Err(FdrError::Domain {
            name: "pi0_star",
            value: pi0_star,
            domain: "(0, inf)",
        });
    }
    Ok(fdr_star_from_count(
        proc.m(),
        pi0_star,
        t,
        proc.sorted().count_le(t),
        cfg.kappa,
    ))
}

pub(crate) fn fdr_star_from_count(m: usize, pi0_star: f64, t: f64, r_t: usize, kappa: f64) -> f64 {
    if t > kappa {
        1.0
    } else {
        m as f64 * pi0_star * t / r_t.max(1) as f64
    }
}

/// `m̂₀ = π̂₀ · m`.
pub fn m0_hat(pi0: f64, m: usize) -> f64 {
    pi0 * m as f64
}

/// One candidate examined by a selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub lambda: f64,
    pub pi0: f64,
}

/// Things a selection rule did that a caller may want to flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SelectionNote {
    /// No candidate met the stopping condition; the fallback was used.
    NoStop,
    /// A data-derived `λ >= 1` was replaced by `max(κ, 1 − 1/m)`.
    UpperClamp,
    /// A data-derived `λ < κ` was raised to `κ`.
    LowerClamp,
    /// The candidate grid was empty after filtering; `λ = κ`.
    EmptyGrid,
}

/// The outcome of a `λ` selection rule.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pi0Estimate {
    pub lambda: f64,
    /// Variant of `value`; selection rules always report `π̂₀*`.
    pub variant: Pi0Variant,
    pub value: f64,
    /// Variant used when comparing candidates; trace values use it.
    pub comparison: Pi0Variant,
    pub trace: Vec<TracePoint>,
    pub notes: Vec<SelectionNote>,
}
