#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use vrsd_core::{generate_synthetic, top_n_filter, CandidateSet, Query, SyntheticSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Top-`n` pool drawn from a `4n`-record synthetic corpus.
pub fn pool(seed: u64, n: usize, d: usize) -> (CandidateSet, Query) {
    let spec = SyntheticSpec {
        seed,
        num_records: 4 * n,
        dimension: d,
        pool_size: n,
        cluster_spread: 0.3,
        distractor_fraction: 0.5,
    };
    let (all, q) = generate_synthetic(&spec).unwrap();
    (top_n_filter(&all, &q, n).unwrap(), q)
}

/// Raw Gaussian candidates (not normalised) and a Gaussian query.
pub fn gaussian_pool(seed: u64, n: usize, d: usize) -> (CandidateSet, Query) {
    let mut r = rng(seed);
    let draw =
        |r: &mut ChaCha8Rng| -> Vec<f64> { (0..d).map(|_| r.sample(StandardNormal)).collect() };
    let vs: Vec<Vec<f64>> = (0..n).map(|_| draw(&mut r)).collect();
    let q = draw(&mut r);
    (
        CandidateSet::from_vectors(vs).unwrap(),
        Query::from_vec("q", q).unwrap(),
    )
}

/// Random orthogonal map as a product of Householder reflections.
pub struct Rotation {
    normals: Vec<Vec<f64>>,
}

impl Rotation {
    pub fn random(seed: u64, d: usize, reflections: usize) -> Self {
        let mut r = rng(seed);
        let normals = (0..reflections)
            .map(|_| (0..d).map(|_| r.sample(StandardNormal)).collect())
            .collect();
        Rotation { normals }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for u in &self.normals {
            let uu: f64 = u.iter().map(|a| a * a).sum();
            let uy: f64 = u.iter().zip(&y).map(|(a, b)| a * b).sum();
            for (yi, ui) in y.iter_mut().zip(u) {
                *yi -= 2.0 * uy / uu * ui;
            }
        }
        y
    }

    pub fn apply_set(&self, c: &CandidateSet) -> CandidateSet {
        c.map_vectors(|v| self.apply(v)).unwrap()
    }

    pub fn apply_query(&self, q: &Query) -> Query {
        Query::from_vec(q.id.clone(), self.apply(&q.vector)).unwrap()
    }
}

/// Independent replay of one greedy sum-vector step: index (into
/// `candidates`) of the first remaining record maximising cos(s + v, q).
pub fn rescan_step(cands: &CandidateSet, q: &Query, chosen: &[usize]) -> usize {
    let s = vrsd_core::sum_vectors(chosen.iter().map(|&i| cands.vector(i))).unwrap();
    let mut best: Option<(usize, f64)> = None;
    for i in 0..cands.len() {
        if chosen.contains(&i) {
            continue;
        }
        let t: Vec<f64> = s.iter().zip(cands.vector(i)).map(|(a, b)| a + b).collect();
        let c = vrsd_core::cosine(&t, &q.vector).unwrap_or(f64::NEG_INFINITY);
        if best.is_none_or(|(_, b)| c > b) {
            best = Some((i, c));
        }
    }
    best.unwrap().0
}

/// Index of the first record with the highest cosine to `q`.
pub fn most_relevant(cands: &CandidateSet, q: &Query) -> usize {
    let mut best = 0;
    let mut best_c = f64::NEG_INFINITY;
    for i in 0..cands.len() {
        let c = vrsd_core::cosine(cands.vector(i), &q.vector).unwrap();
        if c > best_c {
            best_c = c;
            best = i;
        }
    }
    best
}
