//! `vrsd` command-line front end.
//!
//! Exit codes: 0 success, 1 data error, 2 usage error, 3 enumeration cap.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "vrsd",
    version,
    about = "Sum-vector retrieval: VRSD, MMR, exact oracle and subset-sum reduction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Cosine,
    Mmr,
    Vrsd,
    Exact,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Select k records for one query and write the selection as JSON.
    Retrieve {
        #[arg(long)]
        embeddings: PathBuf,
        /// JSONL file holding exactly one query.
        #[arg(long)]
        query: PathBuf,
        #[arg(long, value_enum)]
        algo: Algo,
        #[arg(long)]
        k: usize,
        /// Candidate pool size: the n records most similar to the query.
        #[arg(long, default_value_t = vrsd_core::ingest::DEFAULT_POOL_SIZE)]
        n: usize,
        /// MMR trade-off; required with --algo mmr and rejected otherwise.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        /// Enumeration cap for --algo exact.
        #[arg(long, default_value_t = vrsd_core::DEFAULT_ENUMERATION_CAP)]
        cap: u128,
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print a human-readable summary instead of JSON on stdout.
        #[arg(long)]
        pretty: bool,
    },
    /// Compare VRSD against MMR at several lambdas over a query file.
    Evaluate {
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = vrsd_core::ingest::DEFAULT_POOL_SIZE)]
        n: usize,
        /// Comma-separated MMR lambdas.
        #[arg(long, default_value = "0,0.5,1")]
        lambdas: String,
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        pretty: bool,
    },
    /// Build the vector-retrieval instance of a k-subset-sum instance.
    Reduce {
        /// Comma-separated integers, e.g. 3,5,2.
        #[arg(long, allow_hyphen_values = true)]
        set: String,
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long)]
        k: usize,
        /// Also decide the instance with the exhaustive oracle.
        #[arg(long)]
        solve: bool,
        #[arg(long, default_value_t = vrsd_core::DEFAULT_ENUMERATION_CAP)]
        cap: u128,
    },
    /// Exhaustive optimum of the sum-vector objective.
    Oracle {
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        k: usize,
        /// Force the most relevant record into the selection.
        #[arg(long)]
        fix_first: bool,
        #[arg(long, default_value_t = vrsd_core::DEFAULT_ENUMERATION_CAP)]
        cap: u128,
        /// Restrict to the n most similar records before enumerating.
        #[arg(long)]
        n: Option<usize>,
        /// A selection JSON (e.g. from `retrieve`) to report the gap against.
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a seeded synthetic corpus and its queries as JSONL.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        num: usize,
        #[arg(long, default_value_t = 32)]
        dim: usize,
        #[arg(long, default_value_t = 0.3)]
        spread: f64,
        #[arg(long, default_value_t = 0.5)]
        distractors: f64,
        /// Number of query directions the clustered records gather around.
        #[arg(long, default_value_t = 1)]
        queries: usize,
        /// Writes <prefix>.embeddings.jsonl and <prefix>.queries.jsonl.
        #[arg(long)]
        out_prefix: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Retrieve {
            embeddings,
            query,
            algo,
            k,
            n,
            lambda,
            cap,
            normalize,
            out,
            pretty,
        } => commands::retrieve(commands::RetrieveArgs {
            embeddings,
            query,
            algo,
            k,
            n,
            lambda,
            cap,
            normalize,
            out,
            pretty,
        }),
        Command::Evaluate {
            embeddings,
            queries,
            k,
            n,
            lambdas,
            normalize,
            out,
            pretty,
        } => commands::evaluate(embeddings, queries, k, n, &lambdas, normalize, out, pretty),
        Command::Reduce {
            set,
            target,
            k,
            solve,
            cap,
        } => commands::reduce(&set, &target, k, solve, cap),
        Command::Oracle {
            embeddings,
            query,
            k,
            fix_first,
            cap,
            n,
            compare,
            normalize,
            out,
        } => commands::oracle(
            embeddings, query, k, fix_first, cap, n, compare, normalize, out,
        ),
        Command::Gen {
            seed,
            num,
            dim,
            spread,
            distractors,
            queries,
            out_prefix,
        } => commands::gen(seed, num, dim, spread, distractors, queries, out_prefix),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
