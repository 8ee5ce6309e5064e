use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = FdrError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum FdrError {
    #[error("p-value sample is empty")]
    EmptySample,

    #[error("p-value at index {index} is {value}, expected a number in [0, 1]")]
    InvalidPValue { index: usize, value: f64 },

    #[error("truth labels have length {labels}, but the sample has {values} p-values")]
    TruthLength { labels: usize, values: usize },

    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("truth labels are required for {0} but the sample has none")]
    MissingTruth(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown procedure spec `{spec}`; valid specs: {valid}")]
    UnknownSpec { spec: String, valid: &'static str },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl FdrError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        FdrError::Config(msg.into())
    }
}

/// Checks `lo <= value <= hi` (NaN fails).
pub(crate) fn check_closed(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    domain: &'static str,
) -> Result<()> {
    if value >= lo && value <= hi {
        Ok(())
    } else {
        Err(FdrError::Domain {
            name,
            value,
            domain,
        })
    }
}
