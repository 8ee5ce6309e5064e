//! Simulation config files (JSON).
//!
//! ```json
//! {
//!   "m": 1000,
//!   "pi0": [0.5, 0.8, 0.95],
//!   "mu": [0.5, 1, 2, 4],
//!   "dependence": { "type": "block_ar", "block_size": 50, "rho": -0.9 },
//!   "alpha": 0.05,
//!   "J": 2000,
//!   "seed": 20190417
//! }
//! ```
//!
//! `pi0` and `mu` take a number or a list; every combination is a scenario.
//! Optional: `kappa` (defaults to `alpha`), `placement` (`leading` or
//! `random`), `procedures` (list of spec strings).

use dynfdr::simulate::{Dependence, NullPlacement, ScenarioConfig};
use dynfdr::{ProcedureSpec, Result as FdrResult};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn values(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![*x],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DependenceConfig {
    Independent,
    BlockAr { block_size: usize, rho: f64 },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementConfig {
    Leading,
    Random,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub m: usize,
    pub pi0: OneOrMany,
    pub mu: OneOrMany,
    #[serde(default = "independent")]
    pub dependence: DependenceConfig,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub kappa: Option<f64>,
    #[serde(rename = "J")]
    pub replications: usize,
    pub seed: u64,
    #[serde(default)]
    pub placement: Option<PlacementConfig>,
    #[serde(default)]
    pub procedures: Option<Vec<String>>,
}

fn independent() -> DependenceConfig {
    DependenceConfig::Independent
}

fn default_alpha() -> f64 {
    0.05
}

pub const DEFAULT_SEED: u64 = 20_190_417;

impl Default for SimulationConfig {
    /// Desk-scale study grid.
    fn default() -> Self {
        Self {
            m: 1000,
            pi0: OneOrMany::Many(vec![0.5, 0.8, 0.95]),
            mu: OneOrMany::Many(vec![0.5, 1.0, 2.0, 4.0]),
            dependence: DependenceConfig::Independent,
            alpha: 0.05,
            kappa: None,
            replications: 2000,
            seed: DEFAULT_SEED,
            placement: None,
            procedures: None,
        }
    }
}

impl SimulationConfig {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// One validated scenario per `(pi0, mu)` pair, `pi0` outermost.
    pub fn scenarios(&self) -> FdrResult<Vec<ScenarioConfig>> {
        let dependence = match self.dependence {
            DependenceConfig::Independent => Dependence::Independent,
            DependenceConfig::BlockAr { block_size, rho } => {
                Dependence::BlockAr { block_size, rho }
            }
        };
        let placement = match self.placement {
            Some(PlacementConfig::Random) => NullPlacement::Random,
            _ => NullPlacement::Leading,
        };
        let mut out = Vec::new();
        for pi0 in self.pi0.values() {
            for mu in self.mu.values() {
                let cfg = ScenarioConfig {
                    m: self.m,
                    pi0,
                    mu,
                    dependence,
                    alpha: self.alpha,
                    kappa: self.kappa.unwrap_or(self.alpha),
                    replications: self.replications,
                    seed: self.seed,
                    placement,
                };
                cfg.validate()?;
                out.push(cfg);
            }
        }
        if out.is_empty() {
            return Err(dynfdr::FdrError::Config(
                "pi0 and mu must be non-empty".into(),
            ));
        }
        Ok(out)
    }

    pub fn procedure_specs(&self) -> FdrResult<Option<Vec<ProcedureSpec>>> {
        self.procedures
            .as_ref()
            .map(|list| list.iter().map(|s| s.parse()).collect())
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let cfg = SimulationConfig::from_json(
            r#"{"m": 100, "pi0": 0.8, "mu": [1, 2],
                "dependence": {"type": "block_ar", "block_size": 10, "rho": -0.9},
                "alpha": 0.1, "J": 5, "seed": 3}"#,
        )
        .unwrap();
        let s = cfg.scenarios().unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].mu, 2.0);
        assert_eq!(s[0].kappa, 0.1);
        assert_eq!(
            s[0].dependence,
            Dependence::BlockAr {
                block_size: 10,
                rho: -0.9
            }
        );
    }

    #[test]
    fn errors_name_the_field() {
        let e = SimulationConfig::from_json(r#"{"m": 10, "pi0": 0.8, "mu": 1, "seed": 1}"#)
            .unwrap_err();
        assert!(e.to_string().contains("J"), "{e}");
        let e = SimulationConfig::from_json(
            r#"{"m": 10, "pi0": 0.8, "mu": 1, "J": 1, "seed": 1, "bogus": 2}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
    }

    #[test]
    fn zero_replications_is_rejected() {
        let cfg = SimulationConfig {
            replications: 0,
            ..Default::default()
        };
        assert!(cfg.scenarios().is_err());
    }

    #[test]
    fn default_grid_has_twelve_scenarios() {
        assert_eq!(SimulationConfig::default().scenarios().unwrap().len(), 12);
    }
}
