//! Sum-vector retrieval.
//!
//! Selects `k` vectors from a candidate pool so that the cosine between the
//! *sum* of the selected vectors and the query is as large as possible. The
//! crate ships:
//!
//! * [`veccore`]: dense `f64` primitives (dot, norm, cosine, summation).
//! * [`algorithms`]: cosine top-k, MMR, and the greedy VRSD heuristic.
//! * [`oracle`]: exhaustive enumeration, brute-force subset-sum and the exact
//!   integer decision check.
//! * [`reduction`]: k-subset-sum to vector-retrieval instance construction and
//!   certificate lifting.
//! * [`metrics`]: win rate / max-diff / mean comparison reports.
//! * [`ingest`]: JSONL loading, seeded synthetic data and JSON persistence.

pub mod algorithms;
pub mod error;
pub mod ingest;
pub mod metrics;
pub mod oracle;
pub mod reduction;
pub mod veccore;

pub use algorithms::{
    build_same_side_scenario, cosine_topk, mmr_select, top_n_filter, vrsd_select, Algorithm,
    CandidateSet, EmbeddingRecord, MmrParams, Query, SameSideScenario, SelectionResult, StepTrace,
};
pub use error::{Error, Result};
pub use ingest::{generate_synthetic, load_embeddings, load_queries, RunConfig, SyntheticSpec};
pub use metrics::{compare, run_suite, AlgorithmSpec, EvaluationReport, QueryOutcome};
pub use oracle::{
    decision_check, exact_select, subset_sum_bruteforce, DecisionOutcome, OracleMode,
    DEFAULT_ENUMERATION_CAP,
};
pub use reduction::{
    expand_to_k_instances, lift_certificate, reduce, ReducedInstance, SubsetSumInstance,
};
pub use veccore::{cosine, dot, norm, normalize, sum_vectors, IntVector, Vector};
