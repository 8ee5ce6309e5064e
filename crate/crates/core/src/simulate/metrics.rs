use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use super::{ProcedureOutcome, ScenarioConfig};
use crate::error::{FdrError, Result};
use crate::procedures::{ProcedureKind, ProcedureSpec};

/// A Monte Carlo mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub se: f64,
}

impl McEstimate {
    /// Mean and `sd / √n`, accumulated in iteration order.
    pub fn from_samples<I: IntoIterator<Item = f64>>(samples: I) -> Self {
        let xs: Vec<f64> = samples.into_iter().collect();
        let n = xs.len();
        if n == 0 {
            return Self {
                value: f64::NAN,
                se: f64::NAN,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return Self {
                value: mean,
                se: 0.0,
            };
        }
        let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
        Self {
            value: mean,
            se: (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRow {
    pub scenario: String,
    pub procedure: String,
    pub replications: usize,
    /// Mean FDP.
    pub realized_fdr: McEstimate,
    /// Realized FDR shifted by the oracle's excess over `α`.
    pub corrected_fdr: McEstimate,
    /// Mean power over the oracle's mean power.
    pub relative_power: McEstimate,
    /// `(1/J) Σ (m̂₀ − m₀)²`.
    pub mse_m0: McEstimate,
    pub mean_lambda: McEstimate,
    pub mean_pi0: McEstimate,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MetricsTable {
    pub rows: Vec<MetricsRow>,
}

impl MetricsTable {
    /// Aggregates `outcomes[replication][procedure]`. One of `procedures`
    /// must be the oracle.
    pub fn from_outcomes(
        cfg: &ScenarioConfig,
        procedures: &[ProcedureSpec],
        outcomes: &[Vec<ProcedureOutcome>],
    ) -> Result<Self> {
        let orc = procedures
            .iter()
            .position(|p| p.kind == ProcedureKind::Oracle)
            .ok_or_else(|| FdrError::config("metrics need the oracle procedure"))?;
        let m0 = cfg.m0() as f64;
        let alpha = cfg.alpha;
        let orc_power = McEstimate::from_samples(outcomes.iter().map(|o| o[orc].power));
        let orc_fdr = McEstimate::from_samples(outcomes.iter().map(|o| o[orc].fdp));

        let rows = procedures
            .iter()
            .enumerate()
            .map(|(k, spec)| {
                let col = |f: fn(&ProcedureOutcome) -> f64| {
                    McEstimate::from_samples(outcomes.iter().map(|o| f(&o[k])))
                };
                let realized = col(|o| o.fdp);
                // paired differences give the SE of the corrected value
                let diff = McEstimate::from_samples(outcomes.iter().map(|o| o[k].fdp - o[orc].fdp));
                let corrected = McEstimate {
                    value: realized.value - (orc_fdr.value - alpha),
                    se: diff.se,
                };
                let power = col(|o| o.power);
                let relative_power = if orc_power.value > 0.0 {
                    let ratio = power.value / orc_power.value;
                    // delta method on the paired ratio of means
                    let lin = McEstimate::from_samples(
                        outcomes.iter().map(|o| o[k].power - ratio * o[orc].power),
                    );
                    McEstimate {
                        value: ratio,
                        se: lin.se / orc_power.value,
                    }
                } else {
                    McEstimate {
                        value: f64::NAN,
                        se: f64::NAN,
                    }
                };
                MetricsRow {
                    scenario: cfg.label(),
                    procedure: spec.label.clone(),
                    replications: outcomes.len(),
                    realized_fdr: realized,
                    corrected_fdr: corrected,
                    relative_power,
                    mse_m0: McEstimate::from_samples(
                        outcomes.iter().map(|o| (o[k].m0_hat - m0).powi(2)),
                    ),
                    mean_lambda: col(|o| o.lambda),
                    mean_pi0: col(|o| o.pi0),
                }
            })
            .collect();
        Ok(Self { rows })
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn extend(&mut self, other: MetricsTable) {
        self.rows.extend(other.rows);
    }

    pub fn row(&self, scenario: &str, procedure: &str) -> Option<&MetricsRow> {
        self.rows
            .iter()
            .find(|r| r.scenario == scenario && r.procedure == procedure)
    }

    /// The row for `procedure`, assuming a single scenario.
    pub fn procedure(&self, procedure: &str) -> Option<&MetricsRow> {
        self.rows.iter().find(|r| r.procedure == procedure)
    }
}

pub const FIGURE_METRICS: [&str; 5] = [
    "fdr",
    "corrected_fdr",
    "rel_power",
    "log_mse_m0",
    "mean_lambda",
];

/// 12 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.11e}")
}

fn figure_values(row: &MetricsRow) -> [McEstimate; 5] {
    let mse = row.mse_m0;
    let log_mse = McEstimate {
        value: mse.value.ln(),
        se: mse.se / mse.value,
    };
    [
        row.realized_fdr,
        row.corrected_fdr,
        row.relative_power,
        log_mse,
        row.mean_lambda,
    ]
}

/// Long-format CSV: `scenario,procedure,metric,value,mc_se`.
pub fn write_figure_data<W: Write>(table: &MetricsTable, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario", "procedure", "metric", "value", "mc_se"])?;
    for row in &table.rows {
        for (metric, est) in FIGURE_METRICS.iter().zip(figure_values(row)) {
            w.write_record([
                row.scenario.as_str(),
                row.procedure.as_str(),
                metric,
                &format_value(est.value),
                &format_value(est.se),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn emit_figure_data(table: &MetricsTable, path: &Path) -> Result<()> {
    if table.is_empty() {
        return Err(FdrError::config("metrics table is empty"));
    }
    let file = File::create(path).map_err(|source| FdrError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_figure_data(table, io::BufWriter::new(file)).map_err(|source| FdrError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureRecord {
    pub scenario: String,
    pub procedure: String,
    pub metric: String,
    pub value: f64,
    pub mc_se: f64,
}

pub fn read_figure_data(path: &Path) -> Result<Vec<FigureRecord>> {
    let csv_err = |source| FdrError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let num = |i: usize| -> Result<f64> {
            rec[i].parse().map_err(|_| {
                FdrError::config(format!("{}: bad number `{}`", path.display(), &rec[i]))
            })
        };
        out.push(FigureRecord {
            scenario: rec[0].to_string(),
            procedure: rec[1].to_string(),
            metric: rec[2].to_string(),
            value: num(3)?,
            mc_se: num(4)?,
        });
    }
    Ok(out)
}
