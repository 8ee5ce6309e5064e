//! Python bindings for the `dynfdr` library.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use dynfdr::simulate::{self, Dependence, ScenarioConfig};
use dynfdr::verify::{self, Suite};
use dynfdr::{
    EmpiricalProcesses, FdrError, FdrEstimatorConfig, LambdaRule, PValueSample, ProcedureSpec,
    RuleKind, Truth,
};

fn py_err(e: FdrError) -> PyErr {
    match e {
        FdrError::Io { .. } | FdrError::Csv { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn processes(pvalues: Vec<f64>) -> PyResult<EmpiricalProcesses> {
    let sample = PValueSample::new(pvalues).map_err(py_err)?;
    Ok(EmpiricalProcesses::new(&sample))
}

fn estimator_config(alpha: f64, kappa: Option<f64>) -> PyResult<FdrEstimatorConfig> {
    FdrEstimatorConfig::new(alpha, kappa.unwrap_or(alpha)).map_err(py_err)
}

fn note_names(notes: &[dynfdr::SelectionNote]) -> Vec<String> {
    notes.iter().map(|n| format!("{n:?}")).collect()
}

/// A selected `λ` with its `π̂₀*(λ)`.
#[pyclass(name = "Pi0Estimate", frozen, from_py_object)]
#[derive(Clone)]
struct PyPi0Estimate {
    #[pyo3(get, name = "lambda_")]
    lambda: f64,
    #[pyo3(get)]
    value: f64,
    /// `(λ, π̂₀)` pairs visited by the rule, in the comparison variant.
    #[pyo3(get)]
    trace: Vec<(f64, f64)>,
    #[pyo3(get)]
    notes: Vec<String>,
}

impl From<dynfdr::Pi0Estimate> for PyPi0Estimate {
    fn from(e: dynfdr::Pi0Estimate) -> Self {
        Self {
            lambda: e.lambda,
            value: e.value,
            trace: e.trace.iter().map(|p| (p.lambda, p.pi0)).collect(),
            notes: note_names(&e.notes),
        }
    }
}

#[pymethods]
impl PyPi0Estimate {
    fn __repr__(&self) -> String {
        format!("Pi0Estimate(lambda_={}, value={})", self.lambda, self.value)
    }
}

/// Outcome of one procedure. `rejected` holds 0-based indices.
#[pyclass(name = "ProcedureResult", frozen, from_py_object)]
#[derive(Clone)]
struct PyProcedureResult {
    #[pyo3(get)]
    procedure: String,
    #[pyo3(get)]
    threshold: f64,
    #[pyo3(get)]
    rejected: Vec<usize>,
    #[pyo3(get)]
    fdr_estimate: f64,
    #[pyo3(get)]
    pi0: Option<PyPi0Estimate>,
}

impl From<dynfdr::ProcedureResult> for PyProcedureResult {
    fn from(r: dynfdr::ProcedureResult) -> Self {
        Self {
            procedure: r.procedure_id,
            threshold: r.threshold,
            rejected: r.rejected,
            fdr_estimate: r.fdr_estimate_at_threshold,
            pi0: r.pi0.map(Into::into),
        }
    }
}

#[pymethods]
impl PyProcedureResult {
    #[getter]
    fn num_rejected(&self) -> usize {
        self.rejected.len()
    }

    #[getter]
    fn lambda_(&self) -> Option<f64> {
        self.pi0.as_ref().map(|e| e.lambda)
    }

    fn __len__(&self) -> usize {
        self.rejected.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "ProcedureResult(procedure={:?}, threshold={}, num_rejected={})",
            self.procedure,
            self.threshold,
            self.rejected.len()
        )
    }
}

/// One row of simulation metrics; each metric is a `(value, mc_se)` pair.
#[pyclass(name = "MetricsRow", frozen)]
struct PyMetricsRow {
    #[pyo3(get)]
    scenario: String,
    #[pyo3(get)]
    procedure: String,
    #[pyo3(get)]
    replications: usize,
    #[pyo3(get)]
    realized_fdr: (f64, f64),
    #[pyo3(get)]
    corrected_fdr: (f64, f64),
    #[pyo3(get)]
    relative_power: (f64, f64),
    #[pyo3(get)]
    mse_m0: (f64, f64),
    #[pyo3(get)]
    mean_lambda: (f64, f64),
    #[pyo3(get)]
    mean_pi0: (f64, f64),
}

impl From<simulate::MetricsRow> for PyMetricsRow {
    fn from(r: simulate::MetricsRow) -> Self {
        let pair = |e: simulate::McEstimate| (e.value, e.se);
        Self {
            scenario: r.scenario,
            procedure: r.procedure,
            replications: r.replications,
            realized_fdr: pair(r.realized_fdr),
            corrected_fdr: pair(r.corrected_fdr),
            relative_power: pair(r.relative_power),
            mse_m0: pair(r.mse_m0),
            mean_lambda: pair(r.mean_lambda),
            mean_pi0: pair(r.mean_pi0),
        }
    }
}

#[pymethods]
impl PyMetricsRow {
    fn __repr__(&self) -> String {
        format!(
            "MetricsRow(scenario={:?}, procedure={:?}, realized_fdr={:?})",
            self.scenario, self.procedure, self.realized_fdr
        )
    }
}

/// Storey's `π̂₀(λ)`.
#[pyfunction]
fn pi0_storey(pvalues: Vec<f64>, lambda_: f64) -> PyResult<f64> {
    dynfdr::pi0_storey(&processes(pvalues)?, lambda_).map_err(py_err)
}

/// `π̂₀*(λ)`, with `+1` in the numerator.
#[pyfunction]
fn pi0_storey_plus(pvalues: Vec<f64>, lambda_: f64) -> PyResult<f64> {
    dynfdr::pi0_storey_plus(&processes(pvalues)?, lambda_).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (pvalues, t, pi0_star, alpha = 0.05, kappa = None))]
fn fdr_hat_star(
    pvalues: Vec<f64>,
    t: f64,
    pi0_star: f64,
    alpha: f64,
    kappa: Option<f64>,
) -> PyResult<f64> {
    let cfg = estimator_config(alpha, kappa)?;
    dynfdr::fdr_hat_star(&processes(pvalues)?, pi0_star, t, &cfg).map_err(py_err)
}

/// Benjamini–Hochberg at level `min(α / pi0, 1)`.
#[pyfunction]
#[pyo3(signature = (pvalues, alpha = 0.05, pi0 = 1.0))]
fn bh(pvalues: Vec<f64>, alpha: f64, pi0: f64) -> PyResult<PyProcedureResult> {
    let proc = processes(pvalues)?;
    let r = dynfdr::bh_step_up(proc.sorted(), alpha, pi0).map_err(py_err)?;
    Ok(r.into())
}

/// Applies a selection rule such as `"rb20"` or `"fixed:0.5"`.
#[pyfunction]
#[pyo3(signature = (pvalues, rule, kappa = 0.05))]
fn select_lambda(pvalues: Vec<f64>, rule: &str, kappa: f64) -> PyResult<PyPi0Estimate> {
    let kind: RuleKind = rule.parse().map_err(py_err)?;
    let est = dynfdr::select_lambda(&processes(pvalues)?, &LambdaRule::new(kind, kappa))
        .map_err(py_err)?;
    Ok(est.into())
}

#[pyfunction]
#[pyo3(signature = (pvalues, rule = "rb20", alpha = 0.05, kappa = None))]
fn dynamic_adaptive(
    pvalues: Vec<f64>,
    rule: &str,
    alpha: f64,
    kappa: Option<f64>,
) -> PyResult<PyProcedureResult> {
    let cfg = estimator_config(alpha, kappa)?;
    let kind: RuleKind = rule.parse().map_err(py_err)?;
    let r = dynfdr::dynamic_adaptive_on(
        &processes(pvalues)?,
        &LambdaRule::new(kind, cfg.kappa),
        &cfg,
    )
    .map_err(py_err)?;
    Ok(r.into())
}

/// Runs a comma-separated list of procedure specs; `orc` needs `pi0`.
#[pyfunction]
#[pyo3(signature = (pvalues, procedures = "bh,rb20,lsl,rb20q", alpha = 0.05, kappa = None, pi0 = None))]
fn run_procedures(
    pvalues: Vec<f64>,
    procedures: &str,
    alpha: f64,
    kappa: Option<f64>,
    pi0: Option<f64>,
) -> PyResult<Vec<PyProcedureResult>> {
    let cfg = estimator_config(alpha, kappa)?;
    let proc = processes(pvalues)?;
    ProcedureSpec::parse_list(procedures)
        .map_err(py_err)?
        .iter()
        .map(|spec| {
            dynfdr::run_procedure(&proc, spec, &cfg, pi0)
                .map(Into::into)
                .map_err(py_err)
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn scenario(
    m: usize,
    pi0: f64,
    mu: f64,
    replications: usize,
    seed: u64,
    alpha: f64,
    kappa: Option<f64>,
    block_size: Option<usize>,
    rho: f64,
) -> PyResult<ScenarioConfig> {
    let dependence = match block_size {
        Some(block_size) => Dependence::BlockAr { block_size, rho },
        None => Dependence::Independent,
    };
    let cfg = ScenarioConfig {
        m,
        pi0,
        mu,
        dependence,
        alpha,
        kappa: kappa.unwrap_or(alpha),
        replications,
        seed,
        ..ScenarioConfig::default()
    };
    cfg.validate().map_err(py_err)?;
    Ok(cfg)
}

/// One simulated replication: `(pvalues, is_null)`.
#[pyfunction]
#[pyo3(signature = (m, pi0, mu, replication = 0, seed = 20190417, block_size = None, rho = 0.0))]
#[allow(clippy::too_many_arguments)]
fn generate(
    m: usize,
    pi0: f64,
    mu: f64,
    replication: u64,
    seed: u64,
    block_size: Option<usize>,
    rho: f64,
) -> PyResult<(Vec<f64>, Vec<bool>)> {
    let cfg = scenario(m, pi0, mu, 1, seed, 0.05, None, block_size, rho)?;
    let sample = simulate::generate_statistics(&cfg, replication).map_err(py_err)?;
    let nulls = sample
        .truth()
        .map(|t| t.iter().map(|&x| x == Truth::TrueNull).collect())
        .unwrap_or_default();
    Ok((sample.values().to_vec(), nulls))
}

/// Monte Carlo metrics for one scenario.
#[pyfunction]
#[pyo3(signature = (
    m = 1000, pi0 = 0.8, mu = 1.0, procedures = "bh,orc,fixed:0.5,rb20,lsl,rb20q",
    replications = 2000, seed = 20190417, alpha = 0.05, kappa = None, block_size = None, rho = 0.0
))]
#[allow(clippy::too_many_arguments)]
fn run_experiment(
    py: Python<'_>,
    m: usize,
    pi0: f64,
    mu: f64,
    procedures: &str,
    replications: usize,
    seed: u64,
    alpha: f64,
    kappa: Option<f64>,
    block_size: Option<usize>,
    rho: f64,
) -> PyResult<Vec<PyMetricsRow>> {
    let cfg = scenario(
        m,
        pi0,
        mu,
        replications,
        seed,
        alpha,
        kappa,
        block_size,
        rho,
    )?;
    let specs = ProcedureSpec::parse_list(procedures).map_err(py_err)?;
    let table = py
        .detach(|| simulate::run_experiment(&cfg, &specs))
        .map_err(py_err)?;
    Ok(table.rows.into_iter().map(Into::into).collect())
}

/// Runs a verification suite; returns `(all_passed, rows)` where each row is
/// `(suite, check, statistic, bound, tolerance, passed)`.
#[pyfunction]
#[pyo3(signature = (suite = "lemma2", seed = 20190417))]
#[allow(clippy::type_complexity)]
fn run_verify(
    py: Python<'_>,
    suite: &str,
    seed: u64,
) -> PyResult<(bool, Vec<(String, String, f64, f64, f64, bool)>)> {
    let suite: Suite = suite.parse().map_err(py_err)?;
    let reports = py
        .detach(|| verify::run_suite(suite, seed))
        .map_err(py_err)?;
    let ok = reports.iter().all(|r| r.passed());
    let rows = reports
        .iter()
        .flat_map(|r| {
            r.rows.iter().map(move |c| {
                (
                    r.suite.to_string(),
                    c.check.clone(),
                    c.statistic,
                    c.bound,
                    c.tolerance,
                    c.passed,
                )
            })
        })
        .collect();
    Ok((ok, rows))
}

#[pymodule]
fn dynfdr_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPi0Estimate>()?;
    m.add_class::<PyProcedureResult>()?;
    m.add_class::<PyMetricsRow>()?;
    m.add_function(wrap_pyfunction!(pi0_storey, m)?)?;
    m.add_function(wrap_pyfunction!(pi0_storey_plus, m)?)?;
    m.add_function(wrap_pyfunction!(fdr_hat_star, m)?)?;
    m.add_function(wrap_pyfunction!(bh, m)?)?;
    m.add_function(wrap_pyfunction!(select_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(dynamic_adaptive, m)?)?;
    m.add_function(wrap_pyfunction!(run_procedures, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
