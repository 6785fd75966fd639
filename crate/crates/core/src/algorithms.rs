//! Selection algorithms over a candidate pool: cosine top-k, maximal marginal
//! relevance (MMR), and the greedy sum-vector heuristic (VRSD).
//!
//! All three share the same first pick, the candidate with the highest cosine
//! to the query. Ties on exactly equal floating-point scores always go to the
//! lowest input index.

use std::collections::HashSet;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::veccore::{self, clamp_unit, cosine_of_sum, dot_unchecked, norm, Vector};

/// One candidate vector with a stable id and optional source text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    pub id: String,
    pub vector: Vector,
    #[serde(rename = "text", default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<String>,
}

impl EmbeddingRecord {
    pub fn new(id: impl Into<String>, vector: Vector, payload: Option<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::InvalidRecord("empty id".into()));
        }
        if norm(&vector) == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(EmbeddingRecord {
            id,
            vector,
            payload,
        })
    }
}

/// Dimension-uniform, id-unique, non-empty collection of records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateSet {
    records: Vec<EmbeddingRecord>,
    dimension: usize,
}

impl CandidateSet {
    pub fn new(records: Vec<EmbeddingRecord>) -> Result<Self> {
        let dimension = records.first().ok_or(Error::EmptyInput)?.vector.dim();
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            if r.vector.dim() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: r.vector.dim(),
                });
            }
            if !seen.insert(r.id.as_str()) {
                return Err(Error::DuplicateId(r.id.clone()));
            }
        }
        Ok(CandidateSet { records, dimension })
    }

    /// Convenience constructor: ids are `"0"`, `"1"`, ... in input order.
    pub fn from_vectors(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let records = vectors
            .into_iter()
            .enumerate()
            .map(|(i, v)| EmbeddingRecord::new(i.to_string(), Vector::new(v)?, None))
            .collect::<Result<Vec<_>>>()?;
        CandidateSet::new(records)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn records(&self) -> &[EmbeddingRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<EmbeddingRecord> {
        self.records
    }

    pub fn vector(&self, index: usize) -> &[f64] {
        &self.records[index].vector
    }

    pub fn id(&self, index: usize) -> &str {
        &self.records[index].id
    }

    /// Records at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<CandidateSet> {
        CandidateSet::new(indices.iter().map(|&i| self.records[i].clone()).collect())
    }

    /// Applies `f` to every vector, keeping ids and payloads.
    pub fn map_vectors<F>(&self, mut f: F) -> Result<CandidateSet>
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        let records = self
            .records
            .iter()
            .map(|r| {
                EmbeddingRecord::new(r.id.clone(), Vector::new(f(&r.vector))?, r.payload.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        CandidateSet::new(records)
    }

    fn check_query(&self, q: &Query) -> Result<()> {
        if q.vector.dim() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: q.vector.dim(),
            });
        }
        Ok(())
    }

    fn norms(&self) -> Vec<f64> {
        self.records.iter().map(|r| norm(&r.vector)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub id: String,
    pub vector: Vector,
}

impl Query {
    pub fn new(id: impl Into<String>, vector: Vector) -> Result<Self> {
        if norm(&vector) == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Query {
            id: id.into(),
            vector,
        })
    }

    pub fn from_vec(id: impl Into<String>, vector: Vec<f64>) -> Result<Self> {
        Query::new(id, Vector::new(vector)?)
    }

    /// Same query with its vector multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Query> {
        Query::new(self.id.clone(), self.vector.scaled(c)?)
    }
}

/// MMR trade-off weight: 1 is pure relevance, 0 pure diversity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MmrParams {
    lambda: f64,
}

impl MmrParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidLambda(lambda));
        }
        Ok(MmrParams { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Cosine,
    Mmr,
    Vrsd,
    Exact,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Cosine => "cosine",
            Algorithm::Mmr => "mmr",
            Algorithm::Vrsd => "vrsd",
            Algorithm::Exact => "exact",
        })
    }
}

/// One iteration of a selection loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepTrace {
    pub step_index: usize,
    pub chosen_id: String,
    /// Score of the chosen candidate under the algorithm's own objective.
    pub objective_value: f64,
    /// Candidates still available when the step ran.
    pub candidates_scanned: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub algorithm: Algorithm,
    pub selected_ids: Vec<String>,
    /// Positions of the selected records in the candidate set.
    pub selected_indices: Vec<usize>,
    pub sum_vector: Vec<f64>,
    /// Cosine between `sum_vector` and the query; 0 when the sum is zero.
    pub score: f64,
    pub steps: Vec<StepTrace>,
    /// Evaluations of `cosine(s + v, q)` (VRSD) or subsets scored (exact).
    pub candidate_evaluations: u64,
    /// Evaluations of `cosine(d_i, d_j)` between candidates (MMR).
    pub pair_similarity_evaluations: u64,
    /// Set when a zero-norm sum vector was encountered.
    #[serde(default)]
    pub degenerate: bool,
}

pub(crate) struct Counters {
    pub candidate_evaluations: u64,
    pub pair_similarity_evaluations: u64,
    pub degenerate: bool,
}

pub(crate) fn finish(
    algorithm: Algorithm,
    cands: &CandidateSet,
    q: &Query,
    indices: Vec<usize>,
    steps: Vec<StepTrace>,
    counters: Counters,
) -> Result<SelectionResult> {
    let sum = veccore::sum_vectors(indices.iter().map(|&i| cands.vector(i)))?;
    let (score, zero_sum) = match veccore::cosine(&sum, &q.vector) {
        Ok(c) => (c, false),
        Err(Error::ZeroNorm) => (0.0, true),
        Err(e) => return Err(e),
    };
    Ok(SelectionResult {
        algorithm,
        selected_ids: indices.iter().map(|&i| cands.id(i).to_owned()).collect(),
        selected_indices: indices,
        sum_vector: sum.into_inner(),
        score,
        steps,
        candidate_evaluations: counters.candidate_evaluations,
        pair_similarity_evaluations: counters.pair_similarity_evaluations,
        degenerate: counters.degenerate || zero_sum,
    })
}

pub(crate) fn check_k(k: usize, available: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if k > available {
        return Err(Error::KTooLarge { k, available });
    }
    Ok(())
}

/// `cosine(d_i, q)` for every record.
pub(crate) fn relevance(cands: &CandidateSet, q: &Query) -> Result<Vec<f64>> {
    cands.check_query(q)?;
    let qn = norm(&q.vector);
    Ok(cands
        .records
        .iter()
        .map(|r| clamp_unit(dot_unchecked(&r.vector, &q.vector) / (norm(&r.vector) * qn)))
        .collect())
}

/// Index of the first maximum.
pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Indices sorted by descending score; stable, so equal scores keep input order.
fn rank_descending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order
}

/// Keeps the `min(n, |all|)` records most similar to `q`, most similar first.
pub fn top_n_filter(all: &CandidateSet, q: &Query, n: usize) -> Result<CandidateSet> {
    if n == 0 {
        return Err(Error::InvalidConfig(
            "pool size n must be at least 1".into(),
        ));
    }
    let rel = relevance(all, q)?;
    let mut order = rank_descending(&rel);
    order.truncate(n);
    all.subset(&order)
}

/// Plain relevance ranking: the `k` records with highest cosine to `q`.
pub fn cosine_topk(cands: &CandidateSet, q: &Query, k: usize) -> Result<SelectionResult> {
    check_k(k, cands.len())?;
    let rel = relevance(cands, q)?;
    let n = cands.len();
    let mut order = rank_descending(&rel);
    order.truncate(k);
    let steps = order
        .iter()
        .enumerate()
        .map(|(step, &i)| StepTrace {
            step_index: step,
            chosen_id: cands.id(i).to_owned(),
            objective_value: rel[i],
            candidates_scanned: n - step,
        })
        .collect();
    finish(
        Algorithm::Cosine,
        cands,
        q,
        order,
        steps,
        Counters {
            candidate_evaluations: 0,
            pair_similarity_evaluations: 0,
            degenerate: false,
        },
    )
}

/// Maximal marginal relevance with cosine for both similarity terms.
///
/// Each step after the first maximises
/// `lambda * cos(d_i, q) - (1 - lambda) * max_{d_j in S} cos(d_i, d_j)`.
/// The first pick is always the most relevant record, including at
/// `lambda = 0` where the formula would score every candidate equally.
/// Pair similarities are recomputed per step, so the pair counter is exactly
/// `sum_{i=1}^{k-1} i * (n - i)`.
pub fn mmr_select(
    cands: &CandidateSet,
    q: &Query,
    k: usize,
    params: MmrParams,
) -> Result<SelectionResult> {
    check_k(k, cands.len())?;
    let lambda = params.lambda();
    let rel = relevance(cands, q)?;
    let norms = cands.norms();
    let n = cands.len();

    let first = argmax(&rel);
    let mut selected = vec![first];
    let mut remaining: Vec<usize> = (0..n).filter(|&i| i != first).collect();
    let mut steps = vec![StepTrace {
        step_index: 0,
        chosen_id: cands.id(first).to_owned(),
        objective_value: lambda * rel[first],
        candidates_scanned: n,
    }];
    let mut pairs = 0u64;

    for step in 1..k {
        let mut best: Option<(usize, f64)> = None;
        for (pos, &i) in remaining.iter().enumerate() {
            let mut max_sim = f64::NEG_INFINITY;
            for &j in &selected {
                let sim = clamp_unit(
                    dot_unchecked(cands.vector(i), cands.vector(j)) / (norms[i] * norms[j]),
                );
                pairs += 1;
                if sim > max_sim {
                    max_sim = sim;
                }
            }
            let score = lambda * rel[i] - (1.0 - lambda) * max_sim;
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((pos, score));
            }
        }
        let (pos, score) = best.expect("k <= n leaves a candidate at every step");
        let chosen = remaining.remove(pos);
        steps.push(StepTrace {
            step_index: step,
            chosen_id: cands.id(chosen).to_owned(),
            objective_value: score,
            candidates_scanned: n - step,
        });
        selected.push(chosen);
    }

    finish(
        Algorithm::Mmr,
        cands,
        q,
        selected,
        steps,
        Counters {
            candidate_evaluations: 0,
            pair_similarity_evaluations: pairs,
            degenerate: false,
        },
    )
}

/// Greedy sum-vector selection (VRSD).
///
/// Starts from the most relevant record, then repeatedly adds the remaining
/// candidate `v` that maximises `cos(s + v, q)`, where `s` is the running sum.
/// A candidate whose addition cancels `s` to zero scores `-inf`; if every
/// remaining candidate cancels, the lowest index is taken, the step's
/// objective is reported as 0 and the result is flagged `degenerate`.
pub fn vrsd_select(cands: &CandidateSet, q: &Query, k: usize) -> Result<SelectionResult> {
    check_k(k, cands.len())?;
    let rel = relevance(cands, q)?;
    let q_norm = norm(&q.vector);
    let n = cands.len();

    let first = argmax(&rel);
    let mut running = cands.vector(first).to_vec();
    let mut selected = vec![first];
    let mut remaining: Vec<usize> = (0..n).filter(|&i| i != first).collect();
    let mut steps = vec![StepTrace {
        step_index: 0,
        chosen_id: cands.id(first).to_owned(),
        objective_value: rel[first],
        candidates_scanned: n,
    }];
    let mut evaluations = 0u64;
    let mut degenerate = false;

    for step in 1..k {
        let mut best: Option<(usize, f64)> = None;
        for (pos, &i) in remaining.iter().enumerate() {
            evaluations += 1;
            let c = cosine_of_sum(&running, cands.vector(i), &q.vector, q_norm)
                .unwrap_or(f64::NEG_INFINITY);
            if best.is_none_or(|(_, b)| c > b) {
                best = Some((pos, c));
            }
        }
        let (pos, mut score) = best.expect("k <= n leaves a candidate at every step");
        if score == f64::NEG_INFINITY {
            degenerate = true;
            score = 0.0;
        }
        let chosen = remaining.remove(pos);
        veccore::add_assign(&mut running, cands.vector(chosen));
        steps.push(StepTrace {
            step_index: step,
            chosen_id: cands.id(chosen).to_owned(),
            objective_value: score,
            candidates_scanned: n - step,
        });
        selected.push(chosen);
    }

    finish(
        Algorithm::Vrsd,
        cands,
        q,
        selected,
        steps,
        Counters {
            candidate_evaluations: evaluations,
            pair_similarity_evaluations: 0,
            degenerate,
        },
    )
}

/// Two-dimensional configuration where every candidate lies on the same side
/// of the query: `d_0` at angle `theta`, the rest at `candidate_angles`, all
/// measured from `q = [1, 0]` in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SameSideScenario {
    pub theta: f64,
    pub candidate_angles: Vec<f64>,
}

impl SameSideScenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if !(self.theta > 0.0 && self.theta < FRAC_PI_2) {
            return bad(format!("theta {} must lie in (0, pi/2)", self.theta));
        }
        let mut prev = self.theta;
        for &a in &self.candidate_angles {
            if a.is_nan() || a <= prev {
                return bad(format!("angle {a} must exceed the previous angle {prev}"));
            }
            if a >= FRAC_PI_2 {
                return bad(format!("angle {a} must be below pi/2"));
            }
            prev = a;
        }
        Ok(())
    }
}

/// Unit vectors at `theta` and each candidate angle (ids `d0`, `d1`, ... in
/// ascending-angle order) and the query `[1, 0]`.
pub fn build_same_side_scenario(s: &SameSideScenario) -> Result<(CandidateSet, Query)> {
    s.validate()?;
    let records = std::iter::once(s.theta)
        .chain(s.candidate_angles.iter().copied())
        .enumerate()
        .map(|(i, a)| {
            EmbeddingRecord::new(format!("d{i}"), Vector::new(vec![a.cos(), a.sin()])?, None)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        CandidateSet::new(records)?,
        Query::from_vec("q", vec![1.0, 0.0])?,
    ))
}
