//! Monte Carlo study of FDR, power and `m₀` estimation.
//!
//! Each replication draws one-sided test statistics `X_i = Z_i` (true nulls)
//! or `X_i = μ + Z_i` (false nulls), converts them to p-values
//! `1 − Φ(X_i)` and runs every procedure on the same sample. Replication `j`
//! uses its own random stream derived from `(seed, j)`, so results do not
//! depend on scheduling; aggregation runs in replication order.

mod generate;
mod metrics;
pub mod normal;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{FdrError, Result};
use crate::estimators::{m0_hat, FdrEstimatorConfig};
use crate::procedures::{run_procedure, ProcedureKind, ProcedureSpec};
use crate::pvalues::EmpiricalProcesses;

pub use generate::{
    block_ar1_noise, generate_statistics, generate_statistics_raw, independent_noise, substream,
};
pub use metrics::{
    emit_figure_data, format_value, read_figure_data, write_figure_data, FigureRecord, McEstimate,
    MetricsRow, MetricsTable, FIGURE_METRICS,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Dependence {
    Independent,
    /// AR(1) noise within consecutive blocks, independent across blocks.
    BlockAr {
        block_size: usize,
        rho: f64,
    },
}

/// Where the false nulls sit in the statistic vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NullPlacement {
    /// False nulls take the first `m₁` positions.
    Leading,
    /// Positions shuffled per replication.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub m: usize,
    pub pi0: f64,
    pub mu: f64,
    pub dependence: Dependence,
    pub alpha: f64,
    pub kappa: f64,
    pub replications: usize,
    pub seed: u64,
    pub placement: NullPlacement,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            m: 1000,
            pi0: 0.8,
            mu: 1.0,
            dependence: Dependence::Independent,
            alpha: 0.05,
            kappa: 0.05,
            replications: 2000,
            seed: 20_190_417,
            placement: NullPlacement::Leading,
        }
    }
}

impl ScenarioConfig {
    pub fn m0(&self) -> usize {
        ((self.pi0 * self.m as f64).round() as usize).min(self.m)
    }

    pub fn m1(&self) -> usize {
        self.m - self.m0()
    }

    pub fn estimator_config(&self) -> Result<FdrEstimatorConfig> {
        FdrEstimatorConfig::new(self.alpha, self.kappa)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(FdrError::config("m must be at least 1"));
        }
        if !(self.pi0 > 0.0 && self.pi0 <= 1.0) {
            return Err(FdrError::config(format!(
                "pi0 = {} is outside (0, 1]",
                self.pi0
            )));
        }
        if self.m0() == 0 {
            return Err(FdrError::config("pi0 * m rounds to zero true nulls"));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(FdrError::config(format!(
                "mu = {} must be finite and >= 0",
                self.mu
            )));
        }
        if self.replications == 0 {
            return Err(FdrError::config("replications (J) must be at least 1"));
        }
        if let Dependence::BlockAr { block_size, rho } = self.dependence {
            if block_size == 0 {
                return Err(FdrError::config("block_size must be at least 1"));
            }
            if !(rho > -1.0 && rho < 1.0) {
                return Err(FdrError::config(format!("rho = {rho} is outside (-1, 1)")));
            }
        }
        self.estimator_config()?;
        Ok(())
    }

    /// Short scenario key used in metrics tables.
    pub fn label(&self) -> String {
        let dep = match self.dependence {
            Dependence::Independent => "indep".to_string(),
            Dependence::BlockAr { block_size, rho } => format!("ar1-b{block_size}-rho{rho}"),
        };
        format!("{dep}/m={}/pi0={}/mu={}", self.m, self.pi0, self.mu)
    }
}

/// Per-replication results for one procedure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProcedureOutcome {
    pub rejections: usize,
    /// `V / (R ∨ 1)`.
    pub fdp: f64,
    /// `S / m₁`, 0 when `m₁ = 0`.
    pub power: f64,
    /// `π₀` used by the procedure: 1 for BH, the truth for the oracle.
    pub pi0: f64,
    pub m0_hat: f64,
    /// NaN for procedures without a tuning parameter.
    pub lambda: f64,
    /// `(α/κ) V(κ) / (m π̂₀*(λ))`; NaN for non-adaptive procedures.
    pub ratio_bound_term: f64,
}

fn one_replication(
    cfg: &ScenarioConfig,
    est_cfg: &FdrEstimatorConfig,
    procedures: &[ProcedureSpec],
    replication: u64,
) -> Result<Vec<ProcedureOutcome>> {
    let sample = generate_statistics(cfg, replication)?;
    let proc = EmpiricalProcesses::new(&sample);
    let m = cfg.m;
    let m1 = cfg.m1();
    let true_pi0 = cfg.m0() as f64 / m as f64;
    let v_kappa = proc.count_v(est_cfg.kappa)?;

    procedures
        .iter()
        .map(|spec| {
            let result = run_procedure(&proc, spec, est_cfg, Some(true_pi0))?;
            let r = result.num_rejected();
            let (v, s) = if r == 0 {
                (0, 0)
            } else {
                (
                    proc.count_v(result.threshold)?,
                    proc.count_s(result.threshold)?,
                )
            };
            let (pi0, lambda, ratio_bound) = match (&spec.kind, &result.pi0) {
                (ProcedureKind::Bh, _) => (1.0, f64::NAN, f64::NAN),
                (ProcedureKind::Oracle, _) => (true_pi0, f64::NAN, f64::NAN),
                (ProcedureKind::Adaptive(_), Some(e)) => (
                    e.value,
                    e.lambda,
                    est_cfg.alpha / est_cfg.kappa * v_kappa as f64 / (m as f64 * e.value),
                ),
                (ProcedureKind::Adaptive(_), None) => unreachable!("adaptive result has pi0"),
            };
            Ok(ProcedureOutcome {
                rejections: r,
                fdp: v as f64 / r.max(1) as f64,
                power: if m1 == 0 { 0.0 } else { s as f64 / m1 as f64 },
                pi0,
                m0_hat: m0_hat(pi0, m),
                lambda,
                ratio_bound_term: ratio_bound,
            })
        })
        .collect()
}

/// Runs every procedure on every replication; `outcomes[j][k]` belongs to
/// replication `j` and `procedures[k]`.
pub fn replicate(
    cfg: &ScenarioConfig,
    procedures: &[ProcedureSpec],
) -> Result<Vec<Vec<ProcedureOutcome>>> {
    cfg.validate()?;
    let est_cfg = cfg.estimator_config()?;
    (0..cfg.replications as u64)
        .into_par_iter()
        .map(|j| one_replication(cfg, &est_cfg, procedures, j))
        .collect()
}

/// Adds the oracle when the list lacks it; metrics are relative to it.
pub fn with_oracle(procedures: &[ProcedureSpec]) -> Vec<ProcedureSpec> {
    let mut procs = procedures.to_vec();
    if !procs.iter().any(|p| p.kind == ProcedureKind::Oracle) {
        procs.insert(0, ProcedureSpec::oracle());
    }
    procs
}

pub fn run_experiment(cfg: &ScenarioConfig, procedures: &[ProcedureSpec]) -> Result<MetricsTable> {
    let procs = with_oracle(procedures);
    let outcomes = replicate(cfg, &procs)?;
    MetricsTable::from_outcomes(cfg, &procs, &outcomes)
}
