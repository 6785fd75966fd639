use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use vrsd_core::ingest::{self, RunConfig, SyntheticSpec};
use vrsd_core::metrics::{candidate_pools, format_table, SuiteReport, TIE_TOLERANCE};
use vrsd_core::reduction::solve_via_reduction;
use vrsd_core::{
    reduce as reduce_instance, top_n_filter, AlgorithmSpec, CandidateSet, Error, OracleMode, Query,
    SelectionResult, SubsetSumInstance,
};

use crate::Algo;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(Error::EnumerationCapExceeded { .. }) => 3,
            CliError::Data(Error::Query { source, .. })
                if matches!(**source, Error::EnumerationCapExceeded { .. }) =>
            {
                3
            }
            CliError::Data(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Data(Error::EnumerationCapExceeded { required, cap }) => write!(
                f,
                "enumeration needs {required} subsets but the cap is {cap}; rerun with --cap {required} or higher"
            ),
            CliError::Data(e) => e.fmt(f),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

type Result<T, E = CliError> = std::result::Result<T, E>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>, to_stdout: bool) -> Result<()> {
    if let Some(path) = out {
        ingest::save_json(value, path)?;
    }
    if to_stdout {
        let body = serde_json::to_string_pretty(value).map_err(Error::from)?;
        let mut stdout = std::io::stdout().lock();
        let _ = writeln!(stdout, "{body}");
    }
    Ok(())
}

fn single_query(path: &Path, normalize: bool) -> Result<Query> {
    let mut queries = ingest::load_queries(path, normalize)?;
    if queries.len() != 1 {
        return Err(CliError::Data(Error::InvalidConfig(format!(
            "{} holds {} queries; expected exactly one",
            path.display(),
            queries.len()
        ))));
    }
    Ok(queries.remove(0))
}

fn print_selection(r: &SelectionResult) {
    println!("algorithm: {}", r.algorithm);
    println!("score:     {:.6}", r.score);
    println!("selected:  {}", r.selected_ids.join(", "));
    if !r.steps.is_empty() {
        println!(
            "{:>4}  {:<16} {:>12} {:>8}",
            "step", "id", "objective", "scanned"
        );
        for s in &r.steps {
            println!(
                "{:>4}  {:<16} {:>12.6} {:>8}",
                s.step_index, s.chosen_id, s.objective_value, s.candidates_scanned
            );
        }
    }
    println!(
        "evaluations: candidate {}, pair {}",
        r.candidate_evaluations, r.pair_similarity_evaluations
    );
    if r.degenerate {
        println!("warning: a zero-norm sum vector was encountered");
    }
}

pub struct RetrieveArgs {
    pub embeddings: PathBuf,
    pub query: PathBuf,
    pub algo: Algo,
    pub k: usize,
    pub n: usize,
    pub lambda: Option<f64>,
    pub cap: u128,
    pub normalize: bool,
    pub out: Option<PathBuf>,
    pub pretty: bool,
}

pub fn retrieve(a: RetrieveArgs) -> Result<()> {
    let spec = match (a.algo, a.lambda) {
        (Algo::Mmr, None) => return usage("--lambda is required with --algo mmr"),
        (Algo::Mmr, Some(l)) => {
            AlgorithmSpec::mmr(l).map_err(|e| CliError::Usage(e.to_string()))?
        }
        (_, Some(_)) => return usage("--lambda is only valid with --algo mmr"),
        (Algo::Cosine, None) => AlgorithmSpec::Cosine,
        (Algo::Vrsd, None) => AlgorithmSpec::Vrsd,
        (Algo::Exact, None) => AlgorithmSpec::Exact {
            fix_first: true,
            cap: u64::try_from(a.cap).unwrap_or(u64::MAX),
        },
    };
    validate_k_n(a.k, a.n)?;
    let corpus = ingest::load_embeddings(&a.embeddings, a.normalize)?;
    let q = single_query(&a.query, a.normalize)?;
    let pool = top_n_filter(&corpus, &q, a.n)?;
    let result = spec.run(&pool, &q, a.k)?;
    emit_json(&result, a.out.as_deref(), !a.pretty)?;
    if a.pretty {
        print_selection(&result);
    }
    Ok(())
}

fn validate_k_n(k: usize, n: usize) -> Result<()> {
    if k == 0 {
        return usage("--k must be at least 1");
    }
    if n < k {
        return usage(format!("--k {k} exceeds --n {n}"));
    }
    Ok(())
}

fn parse_lambdas(csv: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in csv.split(',') {
        let l: f64 = part
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("invalid lambda {part:?}")))?;
        if !(0.0..=1.0).contains(&l) {
            return usage(format!("lambda {l} outside [0, 1]"));
        }
        out.push(l);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
pub fn evaluate(
    embeddings: PathBuf,
    queries: PathBuf,
    k: usize,
    n: usize,
    lambdas: &str,
    normalize: bool,
    out: Option<PathBuf>,
    pretty: bool,
) -> Result<()> {
    let lambdas = parse_lambdas(lambdas)?;
    validate_k_n(k, n)?;
    let mut algorithms = vec![AlgorithmSpec::Vrsd];
    for l in &lambdas {
        algorithms.push(AlgorithmSpec::Mmr { lambda: *l });
    }
    let config = RunConfig {
        k,
        n,
        algorithms,
        normalize_on_load: normalize,
        embeddings_path: embeddings,
        queries_path: queries,
        output_path: out,
    };
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let corpus = ingest::load_embeddings(&config.embeddings_path, config.normalize_on_load)?;
    let queries = ingest::load_queries(&config.queries_path, config.normalize_on_load)?;
    let cases = candidate_pools(&corpus, &queries, config.n)?;
    let outcomes = vrsd_core::run_suite(&cases, &config.algorithms, config.k)?;
    let challenger = AlgorithmSpec::Vrsd.tag();
    let baselines: Vec<String> = config.algorithms[1..]
        .iter()
        .map(AlgorithmSpec::tag)
        .collect();
    let report = SuiteReport::build(&outcomes, &challenger, &baselines, config.k, config.n)?;
    emit_json(&report, config.output_path.as_deref(), !pretty)?;
    if pretty {
        println!(
            "queries: {}  k: {}  n: {}",
            outcomes.len(),
            config.k,
            config.n
        );
        print!("{}", format_table(&report.reports));
    }
    Ok(())
}

fn parse_int(s: &str) -> Result<i64> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid integer {s:?}")))
}

fn join<T: fmt::Display>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn reduce(set: &str, target: &str, k: usize, solve: bool, cap: u128) -> Result<()> {
    let values = set.split(',').map(parse_int).collect::<Result<Vec<_>>>()?;
    let target = parse_int(target)?;
    let inst =
        SubsetSumInstance::new(values, target, k).map_err(|e| CliError::Usage(e.to_string()))?;
    let red = reduce_instance(&inst);
    println!("R = [{}]", join(&red.candidates));
    println!("q = {}", red.query);
    println!("k = {}", red.k);
    if solve {
        let verdict = solve_via_reduction(&inst, cap)?;
        match &verdict.subset {
            Some(positions) => println!(
                "YES subset {{{}}} at positions [{}]",
                join(positions.iter().map(|&p| inst.values()[p])),
                join(positions)
            ),
            None => println!("NO (best cosine {:.12})", verdict.selection.score),
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct OracleReport {
    optimum: SelectionResult,
    /// Score of the selection passed with --compare.
    compared_score: Option<f64>,
    /// `optimum.score - compared_score`, zero when within the tie tolerance.
    gap: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn oracle(
    embeddings: PathBuf,
    query: PathBuf,
    k: usize,
    fix_first: bool,
    cap: u128,
    n: Option<usize>,
    compare: Option<PathBuf>,
    normalize: bool,
    out: Option<PathBuf>,
) -> Result<()> {
    if k == 0 {
        return usage("--k must be at least 1");
    }
    if let Some(n) = n {
        validate_k_n(k, n)?;
    }
    let corpus = ingest::load_embeddings(&embeddings, normalize)?;
    let q = single_query(&query, normalize)?;
    let cands: CandidateSet = match n {
        Some(n) => top_n_filter(&corpus, &q, n)?,
        None => corpus,
    };
    let compared = compare.map(ingest::load_selection).transpose()?;
    let optimum = vrsd_core::exact_select(&cands, &q, k, OracleMode { fix_first }, cap)?;
    let compared_score = compared.map(|c| c.score);
    let report = OracleReport {
        gap: compared_score.map(|s| gap(optimum.score, s)),
        compared_score,
        optimum,
    };
    emit_json(&report, out.as_deref(), true)
}

/// Sums taken in a different order can differ in the last bit, so differences
/// inside the tie tolerance are reported as zero.
fn gap(optimum: f64, other: f64) -> f64 {
    let d = optimum - other;
    if d.abs() <= TIE_TOLERANCE {
        0.0
    } else {
        d
    }
}

pub fn gen(
    seed: u64,
    num: usize,
    dim: usize,
    spread: f64,
    distractors: f64,
    queries: usize,
    out_prefix: PathBuf,
) -> Result<()> {
    let spec = SyntheticSpec {
        seed,
        num_records: num,
        dimension: dim,
        pool_size: num.clamp(1, ingest::DEFAULT_POOL_SIZE),
        cluster_spread: spread,
        distractor_fraction: distractors,
    };
    spec.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if queries == 0 {
        return usage("--queries must be at least 1");
    }
    let (cands, qs) = ingest::generate_corpus(&spec, queries)?;
    let prefix = out_prefix.as_os_str().to_owned();
    let with_suffix = |s: &str| {
        let mut p = prefix.clone();
        p.push(s);
        PathBuf::from(p)
    };
    let e = with_suffix(".embeddings.jsonl");
    let q = with_suffix(".queries.jsonl");
    ingest::write_embeddings(&e, &cands)?;
    ingest::write_queries(&q, &qs)?;
    println!("{}", e.display());
    println!("{}", q.display());
    Ok(())
}
