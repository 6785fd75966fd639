//! Fixtures shared by the selection benchmarks.

use vrsd_core::{generate_synthetic, top_n_filter, CandidateSet, Query, SyntheticSpec};

/// A seeded corpus of `num` records in `dim` dimensions and its query.
pub fn corpus(seed: u64, num: usize, dim: usize) -> (CandidateSet, Query) {
    let spec = SyntheticSpec {
        seed,
        num_records: num,
        dimension: dim,
        pool_size: num.min(20),
        cluster_spread: 0.3,
        distractor_fraction: 0.5,
    };
    generate_synthetic(&spec).expect("valid synthetic spec")
}

/// The `n` records of a seeded corpus most similar to its query.
pub fn pool(seed: u64, n: usize, dim: usize) -> (CandidateSet, Query) {
    let (all, q) = corpus(seed, 4 * n, dim);
    let pool = top_n_filter(&all, &q, n).expect("n >= 1");
    (pool, q)
}
