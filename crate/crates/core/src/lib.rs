//! Dynamic adaptive false discovery rate control.
//!
//! The tuning parameter `λ` of a Storey-type `π₀` estimator is chosen from the
//! data by a stopping-time rule (right-boundary, lowest-slope, quantile
//! variants), and the resulting estimate drives a `κ`-truncated FDR estimator
//! whose step-up threshold controls the FDR in finite samples.
//!
//! Layout:
//! - [`pvalues`]: samples, order statistics and the counting processes `R`, `V`, `S`.
//! - [`estimators`]: `π₀` and FDR estimators.
//! - [`selection`]: `λ` selection rules.
//! - [`procedures`]: BH / oracle step-up and the dynamic adaptive procedure.
//! - [`simulate`]: Monte Carlo data generation and metrics.
//! - [`verify`]: empirical checks of the supporting inequalities.
//!
//! ```
//! use dynfdr::{dynamic_adaptive, FdrEstimatorConfig, LambdaRule, PValueSample};
//!
//! let sample = PValueSample::new(vec![0.001, 0.004, 0.03, 0.2, 0.6, 0.9])?;
//! let cfg = FdrEstimatorConfig::with_alpha(0.05)?;
//! let rule = LambdaRule::new("rb20".parse()?, cfg.kappa);
//! let result = dynamic_adaptive(&sample, &rule, &cfg)?;
//! assert_eq!(result.rejected, vec![0, 1, 2]);
//! # Ok::<(), dynfdr::FdrError>(())
//! ```

pub mod error;
pub mod estimators;
pub mod procedures;
pub mod pvalues;
pub mod selection;
pub mod simulate;
pub mod verify;

pub use error::{FdrError, Result};
pub use estimators::{
    fdr_hat_star, m0_hat, pi0_estimate, pi0_storey, pi0_storey_plus, FdrEstimatorConfig,
    Pi0Estimate, Pi0Variant, SelectionNote, TracePoint,
};
pub use procedures::{
    bh_step_up, dynamic_adaptive, dynamic_adaptive_on, run_procedure, threshold_functional,
    ProcedureKind, ProcedureResult, ProcedureSpec,
};
pub use pvalues::{sort_pvalues, EmpiricalProcesses, PValueSample, SortedPValues, Truth};
pub use selection::{select_lambda, KChoice, LambdaRule, RuleKind};
