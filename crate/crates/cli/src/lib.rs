//! `dynfdr` command-line front end.

pub mod config;
pub mod input;

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::builder::PossibleValuesParser;
use clap::{Parser, Subcommand};
use serde::Serialize;

use dynfdr::simulate::{run_experiment, write_figure_data, MetricsTable};
use dynfdr::verify::{run_suite, write_reports_csv, Suite};
use dynfdr::{
    m0_hat, run_procedure, EmpiricalProcesses, FdrEstimatorConfig, PValueSample, ProcedureKind,
    ProcedureSpec, SelectionNote,
};

use config::{SimulationConfig, DEFAULT_SEED};

/// Bad flags, specs or configs; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(e: impl fmt::Display) -> anyhow::Error {
    UsageError(e.to_string()).into()
}

#[derive(Debug, Parser)]
#[command(name = "dynfdr", version, about = "Dynamic adaptive FDR procedures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run procedures on a file of p-values.
    Analyze {
        /// One p-value per line; optional header and 0/1 truth column (1 = true null).
        #[arg(long, short)]
        input: PathBuf,
        /// Comma-separated procedure specs, e.g. `bh,rb20,lsl`.
        #[arg(
            long = "procedures",
            visible_alias = "procedure",
            default_value = "rb20"
        )]
        procedures: String,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Defaults to alpha.
        #[arg(long)]
        kappa: Option<f64>,
        /// Known null proportion for the oracle (`orc`); otherwise taken from truth labels.
        #[arg(long)]
        pi0: Option<f64>,
        /// JSON output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the Monte Carlo study and write long-format metrics CSV.
    Simulate {
        /// JSON scenario config; the desk-scale grid when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config's procedure list.
        #[arg(long)]
        procedures: Option<String>,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// CSV output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite; exits 0 only if every check passes.
    Verify {
        #[arg(long, default_value = "all", value_parser = PossibleValuesParser::new(Suite::NAMES))]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// CSV output path for the check rows.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs a parsed command. `Ok(false)` means it ran but a check failed.
pub fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Analyze {
            input,
            procedures,
            alpha,
            kappa,
            pi0,
            out,
        } => cmd_analyze(&input, &procedures, alpha, kappa, pi0, out.as_deref()).map(|_| true),
        Command::Simulate {
            config,
            procedures,
            seed,
            out,
        } => cmd_simulate(
            config.as_deref(),
            procedures.as_deref(),
            seed,
            out.as_deref(),
        )
        .map(|_| true),
        Command::Verify { suite, seed, out } => cmd_verify(&suite, seed, out.as_deref()),
    }
}

#[derive(Debug, Serialize)]
pub struct AnalyzeRecord {
    pub procedure: String,
    pub lambda: Option<f64>,
    pub pi0: f64,
    pub m0_hat: f64,
    pub threshold: f64,
    pub fdr_estimate: f64,
    pub num_rejected: usize,
    /// 1-based positions in file order.
    pub rejected: Vec<usize>,
    pub notes: Vec<SelectionNote>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub false_discoveries: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeOutput {
    pub m: usize,
    pub alpha: f64,
    pub kappa: f64,
    pub results: Vec<AnalyzeRecord>,
}

fn write_or_stdout(out: Option<&Path>, contents: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
        }
        None => io::stdout()
            .write_all(contents)
            .context("writing to stdout"),
    }
}

pub fn cmd_analyze(
    input: &Path,
    procedures: &str,
    alpha: f64,
    kappa: Option<f64>,
    pi0: Option<f64>,
    out: Option<&Path>,
) -> Result<AnalyzeOutput> {
    let specs = ProcedureSpec::parse_list(procedures).map_err(usage)?;
    if specs.is_empty() {
        return Err(usage("no procedures given"));
    }
    let cfg = FdrEstimatorConfig::new(alpha, kappa.unwrap_or(alpha)).map_err(usage)?;
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let parsed =
        input::parse_pvalues(&text).with_context(|| format!("parsing {}", input.display()))?;
    let sample = match parsed.truth {
        Some(truth) => PValueSample::with_truth(parsed.values, truth)?,
        None => PValueSample::new(parsed.values)?,
    };
    let proc = EmpiricalProcesses::new(&sample);
    let m = sample.len();

    let mut results = Vec::with_capacity(specs.len());
    for spec in &specs {
        if spec.kind == ProcedureKind::Oracle && pi0.is_none() && !proc.has_truth() {
            return Err(usage("`orc` needs --pi0 or a truth column"));
        }
        let r = run_procedure(&proc, spec, &cfg, pi0)?;
        let pi0_used = match (&spec.kind, &r.pi0) {
            (ProcedureKind::Bh, _) => 1.0,
            (ProcedureKind::Oracle, _) => {
                pi0.unwrap_or_else(|| proc.m0().unwrap_or(m) as f64 / m as f64)
            }
            (_, Some(e)) => e.value,
            (_, None) => unreachable!("adaptive result has pi0"),
        };
        let false_discoveries = if proc.has_truth() && !r.rejected.is_empty() {
            Some(proc.count_v(r.threshold)?)
        } else if proc.has_truth() {
            Some(0)
        } else {
            None
        };
        results.push(AnalyzeRecord {
            procedure: r.procedure_id.clone(),
            lambda: r.lambda(),
            pi0: pi0_used,
            m0_hat: m0_hat(pi0_used, m),
            threshold: r.threshold,
            fdr_estimate: r.fdr_estimate_at_threshold,
            num_rejected: r.num_rejected(),
            rejected: r.rejected.iter().map(|i| i + 1).collect(),
            notes: r.pi0.map(|e| e.notes).unwrap_or_default(),
            false_discoveries,
        });
    }

    let output = AnalyzeOutput {
        m,
        alpha: cfg.alpha,
        kappa: cfg.kappa,
        results,
    };
    let mut json = serde_json::to_vec_pretty(&output)?;
    json.push(b'\n');
    write_or_stdout(out, &json)?;
    if out.is_some() {
        for r in &output.results {
            println!(
                "{:<12} lambda={:<8} pi0*={:.4} threshold={:.6e} rejected={}",
                r.procedure,
                r.lambda.map_or("-".to_string(), |l| format!("{l:.4}")),
                r.pi0,
                r.threshold,
                r.num_rejected
            );
        }
    }
    Ok(output)
}

pub fn cmd_simulate(
    config: Option<&Path>,
    procedures: Option<&str>,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<MetricsTable> {
    let mut sim = match config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            SimulationConfig::from_json(&text)
                .map_err(|e| usage(format!("config {}: {e}", path.display())))?
        }
        None => SimulationConfig::default(),
    };
    if let Some(seed) = seed {
        sim.seed = seed;
    }
    let specs = match procedures {
        Some(list) => ProcedureSpec::parse_list(list).map_err(usage)?,
        None => sim
            .procedure_specs()
            .map_err(usage)?
            .unwrap_or_else(ProcedureSpec::default_set),
    };
    let scenarios = sim.scenarios().map_err(usage)?;

    let mut table = MetricsTable::default();
    for cfg in &scenarios {
        table.extend(run_experiment(cfg, &specs)?);
    }

    let mut csv = Vec::new();
    write_figure_data(&table, &mut csv)?;
    write_or_stdout(out, &csv)?;

    let summary = summary_table(&table);
    if out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(table)
}

fn summary_table(table: &MetricsTable) -> String {
    let mut s = format!(
        "{:<32} {:<10} {:>8} {:>9} {:>9} {:>9} {:>8}\n",
        "scenario", "procedure", "fdr", "corr_fdr", "rel_pow", "log_mse", "lambda"
    );
    for r in &table.rows {
        s.push_str(&format!(
            "{:<32} {:<10} {:>8.4} {:>9.4} {:>9.4} {:>9.3} {:>8.4}\n",
            r.scenario,
            r.procedure,
            r.realized_fdr.value,
            r.corrected_fdr.value,
            r.relative_power.value,
            r.mse_m0.value.ln(),
            r.mean_lambda.value
        ));
    }
    s
}

pub fn cmd_verify(suite: &str, seed: u64, out: Option<&Path>) -> Result<bool> {
    let suite: Suite = suite.parse().map_err(usage)?;
    let reports = run_suite(suite, seed)?;
    for r in &reports {
        print!("{r}");
    }
    if let Some(path) = out {
        let file =
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_reports_csv(&reports, io::BufWriter::new(file))?;
    }
    let ok = reports.iter().all(|r| r.passed());
    println!(
        "{}",
        if ok {
            "all checks passed"
        } else {
            "some checks FAILED"
        }
    );
    Ok(ok)
}
