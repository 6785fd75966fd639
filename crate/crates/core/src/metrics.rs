//! Sum-vector evaluation over a query suite: win rate, max-diff and mean.
//!
//! Each algorithm's selection for a query is summarised by the cosine of its
//! sum vector with the query. Two algorithms are then compared query by query.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{
    cosine_topk, mmr_select, top_n_filter, vrsd_select, CandidateSet, MmrParams, Query,
    SelectionResult,
};
use crate::error::{Error, Result};
use crate::oracle::{exact_select, OracleMode};

/// Scores closer than this count as a tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// An algorithm together with its configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum AlgorithmSpec {
    Cosine,
    Mmr { lambda: f64 },
    Vrsd,
    Exact { fix_first: bool, cap: u64 },
}

impl AlgorithmSpec {
    pub fn mmr(lambda: f64) -> Result<Self> {
        MmrParams::new(lambda)?;
        Ok(AlgorithmSpec::Mmr { lambda })
    }

    /// Stable label used as the score key, e.g. `vrsd` or `mmr(lambda=0.5)`.
    pub fn tag(&self) -> String {
        match self {
            AlgorithmSpec::Cosine => "cosine".into(),
            AlgorithmSpec::Mmr { lambda } => format!("mmr(lambda={lambda})"),
            AlgorithmSpec::Vrsd => "vrsd".into(),
            AlgorithmSpec::Exact { .. } => "exact".into(),
        }
    }

    pub fn run(&self, cands: &CandidateSet, q: &Query, k: usize) -> Result<SelectionResult> {
        match *self {
            AlgorithmSpec::Cosine => cosine_topk(cands, q, k),
            AlgorithmSpec::Mmr { lambda } => mmr_select(cands, q, k, MmrParams::new(lambda)?),
            AlgorithmSpec::Vrsd => vrsd_select(cands, q, k),
            AlgorithmSpec::Exact { fix_first, cap } => {
                exact_select(cands, q, k, OracleMode { fix_first }, cap as u128)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryOutcome {
    pub query_id: String,
    pub scores: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub challenger_tag: String,
    pub baseline_tag: String,
    pub num_queries: usize,
    /// Fraction of queries where the challenger beats the baseline.
    pub win_rate: f64,
    pub tie_rate: f64,
    /// Largest signed `challenger - baseline` over the queries.
    pub max_diff: f64,
    pub mean_by_algorithm: BTreeMap<String, f64>,
}

/// Order-independent arithmetic mean: values are summed in sorted order.
fn mean(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn compare(
    outcomes: &[QueryOutcome],
    challenger: &str,
    baseline: &str,
) -> Result<EvaluationReport> {
    if outcomes.is_empty() {
        return Err(Error::EmptyInput);
    }
    let score = |o: &QueryOutcome, tag: &str| {
        o.scores.get(tag).copied().ok_or_else(|| Error::MissingTag {
            query_id: o.query_id.clone(),
            tag: tag.to_owned(),
        })
    };
    let mut wins = 0usize;
    let mut ties = 0usize;
    let mut max_diff = f64::NEG_INFINITY;
    let mut ch = Vec::with_capacity(outcomes.len());
    let mut bl = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        let c = score(o, challenger)?;
        let b = score(o, baseline)?;
        let diff = c - b;
        if diff.abs() <= TIE_TOLERANCE {
            ties += 1;
        } else if diff > 0.0 {
            wins += 1;
        }
        max_diff = max_diff.max(diff);
        ch.push(c);
        bl.push(b);
    }
    let n = outcomes.len() as f64;
    let mut means = BTreeMap::new();
    means.insert(baseline.to_owned(), mean(&mut bl));
    means.insert(challenger.to_owned(), mean(&mut ch));
    Ok(EvaluationReport {
        challenger_tag: challenger.to_owned(),
        baseline_tag: baseline.to_owned(),
        num_queries: outcomes.len(),
        win_rate: wins as f64 / n,
        tie_rate: ties as f64 / n,
        max_diff,
        mean_by_algorithm: means,
    })
}

/// Runs every algorithm on every `(query, candidates)` case. Queries are
/// processed in parallel; the output order matches the input order.
pub fn run_suite(
    cases: &[(Query, CandidateSet)],
    algorithms: &[AlgorithmSpec],
    k: usize,
) -> Result<Vec<QueryOutcome>> {
    if cases.is_empty() {
        return Err(Error::EmptyInput);
    }
    cases
        .par_iter()
        .map(|(q, cands)| {
            let scores = algorithms
                .iter()
                .map(|a| Ok((a.tag(), a.run(cands, q, k)?.score)))
                .collect::<Result<BTreeMap<_, _>>>()
                .map_err(|e| Error::Query {
                    query_id: q.id.clone(),
                    source: Box::new(e),
                })?;
            Ok(QueryOutcome {
                query_id: q.id.clone(),
                scores,
            })
        })
        .collect()
}

/// Pairs each query with its top-`n` pool from a shared corpus.
pub fn candidate_pools(
    corpus: &CandidateSet,
    queries: &[Query],
    n: usize,
) -> Result<Vec<(Query, CandidateSet)>> {
    queries
        .par_iter()
        .map(|q| {
            let pool = top_n_filter(corpus, q, n).map_err(|e| Error::Query {
                query_id: q.id.clone(),
                source: Box::new(e),
            })?;
            Ok((q.clone(), pool))
        })
        .collect()
}

/// The challenger against each baseline, as produced by `evaluate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub k: usize,
    pub n: usize,
    pub challenger: String,
    pub reports: Vec<EvaluationReport>,
}

impl SuiteReport {
    pub fn build(
        outcomes: &[QueryOutcome],
        challenger: &str,
        baselines: &[String],
        k: usize,
        n: usize,
    ) -> Result<Self> {
        let reports = baselines
            .iter()
            .map(|b| compare(outcomes, challenger, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(SuiteReport {
            k,
            n,
            challenger: challenger.to_owned(),
            reports,
        })
    }
}

pub fn format_percent(rate: f64) -> String {
    format!("{:.1}%", rate * 100.0)
}

pub fn format_real(x: f64) -> String {
    format!("{x:.3}")
}

/// Win rate, max-diff and baseline mean, formatted as one results-table row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub label: String,
    pub win_rate: String,
    pub max_diff: String,
    pub mean: String,
}

impl EvaluationReport {
    pub fn table_row(&self) -> TableRow {
        TableRow {
            label: self.baseline_tag.clone(),
            win_rate: format_percent(self.win_rate),
            max_diff: format_real(self.max_diff),
            mean: format_real(self.mean_by_algorithm[&self.baseline_tag]),
        }
    }
}

/// Aligned plain-text table: the challenger's mean first, then one row per
/// baseline with the challenger's win rate and max-diff against it.
pub fn format_table(reports: &[EvaluationReport]) -> String {
    let Some(first) = reports.first() else {
        return String::new();
    };
    let challenger = &first.challenger_tag;
    let mut rows = vec![[
        "Algorithm".to_owned(),
        format!("{challenger} win rate"),
        "Max-diff".to_owned(),
        "Mean".to_owned(),
    ]];
    rows.push([
        challenger.clone(),
        "-".into(),
        "-".into(),
        format_real(first.mean_by_algorithm[challenger]),
    ]);
    for r in reports {
        let row = r.table_row();
        rows.push([row.label, row.win_rate, row.max_diff, row.mean]);
    }
    let widths: Vec<usize> = (0..4)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c == 0 {
                let _ = write!(line, "{cell:<w$}", w = widths[c]);
            } else {
                let _ = write!(line, "  {cell:>w$}", w = widths[c]);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}
