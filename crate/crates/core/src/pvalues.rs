//! P-value samples, order statistics and the empirical counting processes.
//!
//! For a cut-off `t`:
//! - `R(t) = #{p_i <= t}`
//! - `V(t) = #{true null p_i <= t}`
//! - `S(t) = #{false null p_i <= t}`
//!
//! All counts use `<=`, so ties and p-values of exactly 0 or 1 are counted
//! as-is. Counting is a binary search on sorted values.

use serde::{Deserialize, Serialize};

use crate::error::{check_closed, FdrError, Result};

/// Ground-truth status of a hypothesis; only known in simulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Truth {
    TrueNull,
    FalseNull,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PValueSample {
    values: Vec<f64>,
    truth: Option<Vec<Truth>>,
}

fn validate_values(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(FdrError::EmptySample);
    }
    match values.iter().position(|p| !(0.0..=1.0).contains(p)) {
        Some(index) => Err(FdrError::InvalidPValue {
            index,
            value: values[index],
        }),
        None => Ok(()),
    }
}

impl PValueSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        validate_values(&values)?;
        Ok(Self {
            values,
            truth: None,
        })
    }

    pub fn with_truth(values: Vec<f64>, truth: Vec<Truth>) -> Result<Self> {
        validate_values(&values)?;
        if truth.len() != values.len() {
            return Err(FdrError::TruthLength {
                labels: truth.len(),
                values: values.len(),
            });
        }
        Ok(Self {
            values,
            truth: Some(truth),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn truth(&self) -> Option<&[Truth]> {
        self.truth.as_deref()
    }

    /// Number of hypotheses `m`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of true nulls, when labels are present.
    pub fn m0(&self) -> Option<usize> {
        self.truth
            .as_ref()
            .map(|t| t.iter().filter(|&&l| l == Truth::TrueNull).count())
    }

    pub fn m1(&self) -> Option<usize> {
        self.m0().map(|m0| self.len() - m0)
    }
}

/// The order statistics `p_(1) <= ... <= p_(m)` together with the
/// permutation linking ranks and original indices. Ranks are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedPValues {
    ordered: Vec<f64>,
    // order[r - 1] = original index of the r-th smallest value
    order: Vec<usize>,
    // ranks[i] = rank of original index i
    ranks: Vec<usize>,
}

impl SortedPValues {
    /// Validates and sorts raw values. Ties keep ascending original index.
    pub fn new(values: &[f64]) -> Result<Self> {
        validate_values(values)?;
        Ok(Self::from_valid(values))
    }

    fn from_valid(values: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        // stable, so ties stay in original order; values are NaN-free
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("validated"));
        let ordered = order.iter().map(|&i| values[i]).collect();
        let mut ranks = vec![0; values.len()];
        for (r, &i) in order.iter().enumerate() {
            ranks[i] = r + 1;
        }
        Self {
            ordered,
            order,
            ranks,
        }
    }

    pub fn ordered(&self) -> &[f64] {
        &self.ordered
    }

    pub fn len(&self) -> usize {
        self.ordered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordered.is_empty()
    }

    /// `p_(rank)` for a 1-based rank.
    pub fn order_stat(&self, rank: usize) -> f64 {
        self.ordered[rank - 1]
    }

    /// 1-based rank of the p-value at `index` in the original sample.
    pub fn rank_of(&self, index: usize) -> usize {
        self.ranks[index]
    }

    /// Original index of the p-value with the given 1-based rank.
    pub fn index_at(&self, rank: usize) -> usize {
        self.order[rank - 1]
    }

    /// `#{p_i <= t}` without domain checks.
    pub fn count_le(&self, t: f64) -> usize {
        self.ordered.partition_point(|&p| p <= t)
    }

    /// Original indices of all p-values `<= threshold`, ascending.
    pub fn indices_le(&self, threshold: f64) -> Vec<usize> {
        let k = self.count_le(threshold);
        let mut idx = self.order[..k].to_vec();
        idx.sort_unstable();
        idx
    }
}

pub fn sort_pvalues(sample: &PValueSample) -> SortedPValues {
    SortedPValues::from_valid(sample.values())
}

/// Evaluators for `R(t)`, `V(t)` and `S(t)`.
#[derive(Debug, Clone)]
pub struct EmpiricalProcesses {
    sorted: SortedPValues,
    // sorted true-null and false-null p-values, when labels are known
    split: Option<(Vec<f64>, Vec<f64>)>,
}

impl EmpiricalProcesses {
    pub fn new(sample: &PValueSample) -> Self {
        let sorted = sort_pvalues(sample);
        let split = sample.truth().map(|truth| {
            let (mut nulls, mut alts) = (Vec::new(), Vec::new());
            for &i in &sorted.order {
                match truth[i] {
                    Truth::TrueNull => nulls.push(sample.values()[i]),
                    Truth::FalseNull => alts.push(sample.values()[i]),
                }
            }
            (nulls, alts)
        });
        Self { sorted, split }
    }

    /// Processes without truth labels; `V` and `S` are unavailable.
    pub fn from_sorted(sorted: SortedPValues) -> Self {
        Self {
            sorted,
            split: None,
        }
    }

    pub fn sorted(&self) -> &SortedPValues {
        &self.sorted
    }

    pub fn m(&self) -> usize {
        self.sorted.len()
    }

    pub fn has_truth(&self) -> bool {
        self.split.is_some()
    }

    pub fn m0(&self) -> Option<usize> {
        self.split.as_ref().map(|(n, _)| n.len())
    }

    pub fn count_r(&self, t: f64) -> Result<usize> {
        check_closed("t", t, 0.0, 1.0, "[0, 1]")?;
        Ok(self.sorted.count_le(t))
    }

    pub fn count_v(&self, t: f64) -> Result<usize> {
        check_closed("t", t, 0.0, 1.0, "[0, 1]")?;
        let (nulls, _) = self.split.as_ref().ok_or(FdrError::MissingTruth("V(t)"))?;
        Ok(nulls.partition_point(|&p| p <= t))
    }

    pub fn count_s(&self, t: f64) -> Result<usize> {
        check_closed("t", t, 0.0, 1.0, "[0, 1]")?;
        let (_, alts) = self.split.as_ref().ok_or(FdrError::MissingTruth("S(t)"))?;
        Ok(alts.partition_point(|&p| p <= t))
    }
}
