//! Step-up thresholding: BH, the oracle, and the dynamic adaptive procedure.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{FdrError, Result};
use crate::estimators::{fdr_star_from_count, FdrEstimatorConfig, Pi0Estimate};
use crate::pvalues::{EmpiricalProcesses, PValueSample, SortedPValues};
use crate::selection::{select_lambda, LambdaRule, RuleKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcedureResult {
    pub procedure_id: String,
    /// Every p-value `<= threshold` is rejected.
    pub threshold: f64,
    /// Original indices of rejected hypotheses, ascending.
    pub rejected: Vec<usize>,
    pub fdr_estimate_at_threshold: f64,
    /// `None` for BH and the oracle.
    pub pi0: Option<Pi0Estimate>,
}

impl ProcedureResult {
    pub fn num_rejected(&self) -> usize {
        self.rejected.len()
    }

    pub fn lambda(&self) -> Option<f64> {
        self.pi0.as_ref().map(|e| e.lambda)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(FdrError::Domain {
            name: "alpha",
            value: alpha,
            domain: "(0, 1)",
        })
    }
}

/// Linear step-up at level `min(α / pi0_target, 1)`: reject up to `p_(k)` with
/// `k = max{i : p_(i) <= i · level / m}`. `pi0_target = 1` is BH; the true
/// `π₀` gives the oracle. The threshold is not truncated at `κ`.
pub fn bh_step_up(sorted: &SortedPValues, alpha: f64, pi0_target: f64) -> Result<ProcedureResult> {
    check_alpha(alpha)?;
    if !(pi0_target > 0.0 && pi0_target.is_finite()) {
        return Err(FdrError::Domain {
            name: "pi0_target",
            value: pi0_target,
            domain: "(0, inf)",
        });
    }
    let m = sorted.len();
    let level = (alpha / pi0_target).min(1.0);
    let ordered = sorted.ordered();
    let k = (1..=m)
        .rev()
        .find(|&i| ordered[i - 1] <= i as f64 * level / m as f64);
    let threshold = k.map_or(0.0, |k| ordered[k - 1]);
    let rejected = if k.is_some() {
        sorted.indices_le(threshold)
    } else {
        Vec::new()
    };
    let fdr_estimate = m as f64 * pi0_target * threshold / rejected.len().max(1) as f64;
    Ok(ProcedureResult {
        procedure_id: if pi0_target == 1.0 { "bh" } else { "orc" }.to_string(),
        threshold,
        rejected,
        fdr_estimate_at_threshold: fdr_estimate,
        pi0: None,
    })
}

/// `t_α(FDR̂*_λ) = sup{t : FDR̂*_λ(t) <= α}`, reported on the finite set
/// `{0, p_(1), ..., p_(m), κ}`.
///
/// Returns `κ` when the estimate at `κ` is within level, otherwise the largest
/// `p_(i) <= κ` whose estimate is within level, otherwise 0. Each choice
/// rejects the same p-values as the exact supremum.
pub fn threshold_functional(
    proc: &EmpiricalProcesses,
    pi0_star: f64,
    cfg: &FdrEstimatorConfig,
) -> Result<f64> {
    if !(pi0_star > 0.0 && pi0_star.is_finite()) {
        return Err(FdrError::Domain {
            name: "pi0_star",
            value: pi0_star,
            domain: "(0, inf)",
        });
    }
    let m = proc.m();
    let sorted = proc.sorted();
    let kappa = cfg.kappa;
    let r_kappa = sorted.count_le(kappa);
    if fdr_star_from_count(m, pi0_star, kappa, r_kappa, kappa) <= cfg.alpha {
        return Ok(kappa);
    }
    let ordered = sorted.ordered();
    for i in (1..=r_kappa).rev() {
        let p = ordered[i - 1];
        // with ties, the top of the tie block has R(p) = i
        if i < r_kappa && ordered[i] == p {
            continue;
        }
        if fdr_star_from_count(m, pi0_star, p, i, kappa) <= cfg.alpha {
            return Ok(p);
        }
    }
    Ok(0.0)
}

/// Select `λ` with `rule`, then threshold `FDR̂*_λ` at `α`.
pub fn dynamic_adaptive(
    sample: &PValueSample,
    rule: &LambdaRule,
    cfg: &FdrEstimatorConfig,
) -> Result<ProcedureResult> {
    dynamic_adaptive_on(&EmpiricalProcesses::new(sample), rule, cfg)
}

pub fn dynamic_adaptive_on(
    proc: &EmpiricalProcesses,
    rule: &LambdaRule,
    cfg: &FdrEstimatorConfig,
) -> Result<ProcedureResult> {
    if rule.kappa != cfg.kappa {
        return Err(FdrError::config(format!(
            "rule kappa {} differs from estimator kappa {}",
            rule.kappa, cfg.kappa
        )));
    }
    let estimate = select_lambda(proc, rule)?;
    let threshold = threshold_functional(proc, estimate.value, cfg)?;
    let sorted = proc.sorted();
    let rejected = sorted.indices_le(threshold);
    let fdr = fdr_star_from_count(
        proc.m(),
        estimate.value,
        threshold,
        rejected.len(),
        cfg.kappa,
    );
    Ok(ProcedureResult {
        procedure_id: rule.kind.to_string(),
        threshold,
        rejected,
        fdr_estimate_at_threshold: fdr,
        pi0: Some(estimate),
    })
}

pub const VALID_PROCEDURE_SPECS: &str = "bh, orc, fixed:<lambda>, rb:<grid>, rb+:<grid>, rb20, lsl, kq:<k|median>, rbq:<levels>, rbq+:<levels>, rb20q";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ProcedureKind {
    Bh,
    Oracle,
    Adaptive(RuleKind),
}

/// A named procedure; `label` is the spec string it was parsed from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcedureSpec {
    pub label: String,
    pub kind: ProcedureKind,
}

impl ProcedureSpec {
    pub fn oracle() -> Self {
        Self {
            label: "orc".into(),
            kind: ProcedureKind::Oracle,
        }
    }

    pub fn is_adaptive(&self) -> bool {
        matches!(self.kind, ProcedureKind::Adaptive(_))
    }

    /// The procedure set used in the simulation study.
    pub fn default_set() -> Vec<Self> {
        ["bh", "orc", "fixed:0.5", "rb20", "lsl", "rb20q"]
            .iter()
            .map(|s| s.parse().expect("built-in spec"))
            .collect()
    }

    pub fn parse_list(list: &str) -> Result<Vec<Self>> {
        list.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(str::parse)
            .collect()
    }
}

impl FromStr for ProcedureSpec {
    type Err = FdrError;

    fn from_str(s: &str) -> Result<Self> {
        let label = s.trim().to_string();
        let kind = match label.to_ascii_lowercase().as_str() {
            "bh" => ProcedureKind::Bh,
            "orc" => ProcedureKind::Oracle,
            _ => ProcedureKind::Adaptive(label.parse().map_err(|e| match e {
                FdrError::UnknownSpec { spec, .. } => FdrError::UnknownSpec {
                    spec,
                    valid: VALID_PROCEDURE_SPECS,
                },
                other => other,
            })?),
        };
        Ok(Self { label, kind })
    }
}

impl fmt::Display for ProcedureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Runs one procedure. The oracle uses `oracle_pi0` if given, else the
/// sample's truth labels.
pub fn run_procedure(
    proc: &EmpiricalProcesses,
    spec: &ProcedureSpec,
    cfg: &FdrEstimatorConfig,
    oracle_pi0: Option<f64>,
) -> Result<ProcedureResult> {
    let mut result = match &spec.kind {
        ProcedureKind::Bh => bh_step_up(proc.sorted(), cfg.alpha, 1.0)?,
        ProcedureKind::Oracle => {
            let pi0 = match oracle_pi0 {
                Some(p) => p,
                None => {
                    let m0 = proc
                        .m0()
                        .ok_or(FdrError::MissingTruth("the oracle procedure"))?;
                    m0 as f64 / proc.m() as f64
                }
            };
            bh_step_up(proc.sorted(), cfg.alpha, pi0)?
        }
        ProcedureKind::Adaptive(kind) => {
            dynamic_adaptive_on(proc, &LambdaRule::new(kind.clone(), cfg.kappa), cfg)?
        }
    };
    result.procedure_id = spec.label.clone();
    Ok(result)
}
