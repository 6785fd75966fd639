//! k-subset-sum to vector retrieval.
//!
//! An instance `(T, t, k)` maps to candidates `[t_i, 1]` and query `[t, k]`.
//! A size-`k` selection whose sum is a positive multiple of the query must
//! have second component `k`, forcing the multiple to be 1 and the first
//! components to sum to `t`.

use serde::{Deserialize, Serialize};

use crate::algorithms::{CandidateSet, EmbeddingRecord, Query, SelectionResult};
use crate::error::{Error, Result};
use crate::oracle::{self, DecisionOutcome, OracleMode};
use crate::veccore::{IntVector, Vector};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetSumInstance {
    values: Vec<i64>,
    target: i64,
    k: usize,
}

impl SubsetSumInstance {
    pub fn new(values: Vec<i64>, target: i64, k: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInstance("T must be non-empty".into()));
        }
        if k == 0 || k > values.len() {
            return Err(Error::InvalidInstance(format!(
                "k = {k} must lie in 1..={}",
                values.len()
            )));
        }
        Ok(SubsetSumInstance { values, target, k })
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn target(&self) -> i64 {
        self.target
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedInstance {
    pub candidates: Vec<IntVector>,
    pub query: IntVector,
    pub k: usize,
    /// Candidate index to position in the original `T`.
    pub id_map: Vec<usize>,
}

impl ReducedInstance {
    /// Floating-point view; record ids are the `T` positions.
    pub fn candidate_set(&self) -> Result<CandidateSet> {
        let records = self
            .candidates
            .iter()
            .zip(&self.id_map)
            .map(|(v, pos)| EmbeddingRecord::new(pos.to_string(), v.to_vector()?, None))
            .collect::<Result<Vec<_>>>()?;
        CandidateSet::new(records)
    }

    pub fn query_vector(&self) -> Result<Query> {
        Query::new("q", self.query.to_vector()?)
    }
}

pub fn reduce(inst: &SubsetSumInstance) -> ReducedInstance {
    ReducedInstance {
        candidates: inst
            .values
            .iter()
            .map(|&t| IntVector::new(t as i128, 1))
            .collect(),
        query: IntVector::new(inst.target as i128, inst.k as i128),
        k: inst.k,
        id_map: (0..inst.values.len()).collect(),
    }
}

/// Maps a yes-selection of the reduced instance back to positions in `T`,
/// sorted ascending.
pub fn lift_certificate(red: &ReducedInstance, selected_indices: &[usize]) -> Result<Vec<usize>> {
    if selected_indices.len() != red.k {
        return Err(Error::NotACertificate(format!(
            "{} indices selected, expected {}",
            selected_indices.len(),
            red.k
        )));
    }
    let mut sorted = selected_indices.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::NotACertificate("indices repeat".into()));
    }
    if let Some(&bad) = sorted.iter().find(|&&i| i >= red.candidates.len()) {
        return Err(Error::NotACertificate(format!("index {bad} out of range")));
    }
    let picked: Vec<IntVector> = sorted.iter().map(|&i| red.candidates[i]).collect();
    let outcome = oracle::decision_check(&picked, &red.query)?;
    if !outcome.is_yes {
        return Err(Error::NotACertificate(
            "sum vector is not a positive multiple of the query".into(),
        ));
    }
    let mut positions: Vec<usize> = sorted.iter().map(|&i| red.id_map[i]).collect();
    positions.sort_unstable();
    Ok(positions)
}

/// `(T, t, 1), (T, t, 2), ..., (T, t, |T|)`.
pub fn expand_to_k_instances(values: &[i64], target: i64) -> Result<Vec<SubsetSumInstance>> {
    if values.is_empty() {
        return Err(Error::InvalidInstance("T must be non-empty".into()));
    }
    (1..=values.len())
        .map(|k| SubsetSumInstance::new(values.to_vec(), target, k))
        .collect()
}

/// Outcome of deciding a k-subset-sum instance through the reduction.
#[derive(Debug, Clone)]
pub struct ReductionVerdict {
    pub reduced: ReducedInstance,
    /// Floating-point oracle run on the reduced instance.
    pub selection: SelectionResult,
    /// Exact integer optimum (lexicographically smallest among exact ties).
    pub exact_indices: Vec<usize>,
    pub outcome: DecisionOutcome,
    /// Positions in `T` when the answer is yes.
    pub subset: Option<Vec<usize>>,
}

/// Reduces, solves with the exhaustive oracle over all `k`-subsets, runs the
/// exact decision check on the optimum and lifts a certificate on yes.
///
/// The decision is taken on the exact integer optimum; the floating-point
/// selection is reported alongside it.
pub fn solve_via_reduction(inst: &SubsetSumInstance, cap: u128) -> Result<ReductionVerdict> {
    let reduced = reduce(inst);
    let cands = reduced.candidate_set()?;
    let q = reduced.query_vector()?;
    let selection = oracle::exact_select(&cands, &q, inst.k(), OracleMode::ANY_SUBSET, cap)?;
    let (exact_indices, _) = oracle::exact_select_int(&reduced, OracleMode::ANY_SUBSET, cap)?;
    let picked: Vec<IntVector> = exact_indices
        .iter()
        .map(|&i| reduced.candidates[i])
        .collect();
    let outcome = oracle::decision_check(&picked, &reduced.query)?;
    let subset = if outcome.is_yes {
        Some(lift_certificate(&reduced, &exact_indices)?)
    } else {
        None
    };
    Ok(ReductionVerdict {
        reduced,
        selection,
        exact_indices,
        outcome,
        subset,
    })
}

/// Integer vector from a floating-point one whose components are integral.
pub fn int_vector_of(v: &Vector) -> Option<IntVector> {
    if v.dim() != 2
        || v.iter()
            .any(|c| c.fract() != 0.0 || c.abs() > 2f64.powi(100))
    {
        return None;
    }
    Some(IntVector::new(v[0] as i128, v[1] as i128))
}
