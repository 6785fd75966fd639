//! Exact ground truth at desk scale: exhaustive k-subset enumeration for the
//! sum-vector objective, a brute-force k-subset-sum solver, and the exact
//! integer test for "the sum vector is a positive multiple of the query".

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::Ratio;

use crate::algorithms::{
    self, check_k, finish, Algorithm, CandidateSet, Counters, Query, SelectionResult,
};
use crate::error::{Error, Result};
use crate::reduction::{ReducedInstance, SubsetSumInstance};
use crate::veccore::{self, IntVector};

/// Default ceiling on the number of subsets [`exact_select`] will score.
pub const DEFAULT_ENUMERATION_CAP: u128 = 5_000_000;

/// Largest `|T|` accepted by [`subset_sum_bruteforce`].
pub const MAX_BRUTEFORCE_SIZE: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OracleMode {
    /// Force the most relevant record into every subset.
    pub fix_first: bool,
}

impl OracleMode {
    pub const FIX_FIRST: OracleMode = OracleMode { fix_first: true };
    pub const ANY_SUBSET: OracleMode = OracleMode { fix_first: false };
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionOutcome {
    pub is_yes: bool,
    /// `alpha` with `sum = alpha * q`, present on yes.
    pub alpha: Option<Ratio<i128>>,
    /// Positions within the checked selection, present on yes.
    pub witness: Option<Vec<usize>>,
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Visits every `r`-combination of `0..n` in lexicographic order. The visitor
/// returns `false` to stop early.
pub(crate) fn for_each_combination<F>(n: usize, r: usize, mut visit: F)
where
    F: FnMut(&[usize]) -> bool,
{
    if r > n {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        if !visit(&idx) {
            return;
        }
        // rightmost position that can still advance
        let Some(p) = (0..r).rev().find(|&p| idx[p] < n - r + p) else {
            return;
        };
        idx[p] += 1;
        for j in p + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Subsets to enumerate, plus the forced index when `fix_first` is set.
fn plan(n: usize, k: usize, fixed: Option<usize>, cap: u128) -> Result<u128> {
    let required = match fixed {
        Some(_) => binomial(n - 1, k - 1),
        None => binomial(n, k),
    };
    if required > cap {
        return Err(Error::EnumerationCapExceeded { required, cap });
    }
    Ok(required)
}

/// Expands a combination over the non-fixed pool to a sorted index tuple.
fn assemble(combo: &[usize], fixed: Option<usize>, out: &mut Vec<usize>) {
    out.clear();
    match fixed {
        None => out.extend_from_slice(combo),
        Some(f) => {
            let mut inserted = false;
            for &c in combo {
                // pool indices skip `f`
                let i = if c >= f { c + 1 } else { c };
                if !inserted && f < i {
                    out.push(f);
                    inserted = true;
                }
                out.push(i);
            }
            if !inserted {
                out.push(f);
            }
        }
    }
}

/// Exhaustive maximiser of `cos(sum(S), q)` over admissible `k`-subsets.
///
/// Subsets are visited in lexicographic index order and the first optimum is
/// kept, so the witness is the lexicographically smallest optimal tuple.
/// `selected_ids` are reported in input-index order.
pub fn exact_select(
    cands: &CandidateSet,
    q: &Query,
    k: usize,
    mode: OracleMode,
    cap: u128,
) -> Result<SelectionResult> {
    check_k(k, cands.len())?;
    let rel = algorithms::relevance(cands, q)?;
    let n = cands.len();
    let fixed = mode.fix_first.then(|| algorithms::argmax(&rel));
    plan(n, k, fixed, cap)?;

    let q_norm = veccore::norm(&q.vector);
    let (pool, r) = match fixed {
        Some(_) => (n - 1, k - 1),
        None => (n, k),
    };
    let mut sum = vec![0.0; cands.dimension()];
    let mut tuple = Vec::with_capacity(k);
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut evaluated = 0u64;

    for_each_combination(pool, r, |combo| {
        assemble(combo, fixed, &mut tuple);
        sum.copy_from_slice(cands.vector(tuple[0]));
        for &i in &tuple[1..] {
            veccore::add_assign(&mut sum, cands.vector(i));
        }
        let s_norm = veccore::norm(&sum);
        let score = if s_norm == 0.0 {
            f64::NEG_INFINITY
        } else {
            veccore::clamp_unit(veccore::dot_unchecked(&sum, &q.vector) / (s_norm * q_norm))
        };
        evaluated += 1;
        if best.as_ref().is_none_or(|(_, b)| score > *b) {
            best = Some((tuple.clone(), score));
        }
        true
    });

    let (indices, _) = best.expect("at least one subset exists when 1 <= k <= n");
    finish(
        Algorithm::Exact,
        cands,
        q,
        indices,
        Vec::new(),
        Counters {
            candidate_evaluations: evaluated,
            pair_similarity_evaluations: 0,
            degenerate: false,
        },
    )
}

/// Exact cosine ordering for integer vectors: compares
/// `a.q / |a|` with `b.q / |b|` without rounding.
fn cmp_cosine_exact(a: &IntVector, b: &IntVector, q: &IntVector) -> Ordering {
    let dot = |v: &IntVector| BigInt::from(v.x()) * q.x() + BigInt::from(v.y()) * q.y();
    let sq = |v: &IntVector| BigInt::from(v.x()) * v.x() + BigInt::from(v.y()) * v.y();
    let (da, db) = (dot(a), dot(b));
    let zero = BigInt::from(0);
    let sign = |d: &BigInt| d.cmp(&zero);
    match sign(&da).cmp(&sign(&db)) {
        Ordering::Equal => {}
        other => return other,
    }
    // same sign: compare da^2 |b|^2 with db^2 |a|^2, flipped when negative
    let lhs = &da * &da * sq(b);
    let rhs = &db * &db * sq(a);
    match sign(&da) {
        Ordering::Less => rhs.cmp(&lhs),
        _ => lhs.cmp(&rhs),
    }
}

/// Integer counterpart of [`exact_select`] for reduced instances: maximises
/// the cosine under exact rational comparison and returns the optimal index
/// tuple (lexicographically smallest among exact ties) with its sum.
pub fn exact_select_int(
    red: &ReducedInstance,
    mode: OracleMode,
    cap: u128,
) -> Result<(Vec<usize>, IntVector)> {
    let n = red.candidates.len();
    check_k(red.k, n)?;
    let q = red.query;
    let fixed = if mode.fix_first {
        let mut best = 0;
        for i in 1..n {
            if cmp_cosine_exact(&red.candidates[i], &red.candidates[best], &q) == Ordering::Greater
            {
                best = i;
            }
        }
        Some(best)
    } else {
        None
    };
    plan(n, red.k, fixed, cap)?;
    let (pool, r) = match fixed {
        Some(_) => (n - 1, red.k - 1),
        None => (n, red.k),
    };
    let mut tuple = Vec::with_capacity(red.k);
    let mut best: Option<(Vec<usize>, IntVector)> = None;
    let mut overflow = false;
    for_each_combination(pool, r, |combo| {
        assemble(combo, fixed, &mut tuple);
        let Some(sum) = tuple.iter().try_fold(IntVector::ZERO, |acc, &i| {
            acc.checked_add(&red.candidates[i])
        }) else {
            overflow = true;
            return false;
        };
        let better = match &best {
            None => true,
            Some((_, b)) => cmp_cosine_exact(&sum, b, &q) == Ordering::Greater,
        };
        if better {
            best = Some((tuple.clone(), sum));
        }
        true
    });
    if overflow {
        return Err(Error::InvalidInstance("integer sum overflows i128".into()));
    }
    Ok(best.expect("at least one subset exists when 1 <= k <= n"))
}

/// Exact test whether `sum(selected) = alpha * q` for some `alpha > 0`.
pub fn decision_check(selected: &[IntVector], q: &IntVector) -> Result<DecisionOutcome> {
    if q.is_zero() {
        return Err(Error::ZeroQuery);
    }
    let (sx, sy) = selected
        .iter()
        .fold((BigInt::from(0), BigInt::from(0)), |(x, y), v| {
            (x + v.x(), y + v.y())
        });
    let cross = &sx * q.y() - &sy * q.x();
    let dot = &sx * q.x() + &sy * q.y();
    let zero = BigInt::from(0);
    if cross != zero || dot <= zero {
        return Ok(DecisionOutcome {
            is_yes: false,
            alpha: None,
            witness: None,
        });
    }
    // parallel and same direction: alpha = s_c / q_c on any nonzero axis of q
    let (num, den) = if q.x() != 0 { (sx, q.x()) } else { (sy, q.y()) };
    let alpha = i128::try_from(num).ok().map(|num| Ratio::new(num, den));
    Ok(DecisionOutcome {
        is_yes: true,
        alpha,
        witness: Some((0..selected.len()).collect()),
    })
}

/// Lexicographically smallest size-`k` subset of `T` summing to `t`, as
/// positions into `T`.
pub fn subset_sum_bruteforce(inst: &SubsetSumInstance) -> Result<Option<Vec<usize>>> {
    let values = inst.values();
    if values.len() > MAX_BRUTEFORCE_SIZE {
        return Err(Error::InstanceTooLarge {
            size: values.len(),
            max: MAX_BRUTEFORCE_SIZE,
        });
    }
    let target = inst.target() as i128;
    let mut found = None;
    for_each_combination(values.len(), inst.k(), |combo| {
        let s: i128 = combo.iter().map(|&i| values[i] as i128).sum();
        if s == target {
            found = Some(combo.to_vec());
            false
        } else {
            true
        }
    });
    Ok(found)
}
