//! Data in and out: JSONL embedding files, seeded synthetic corpora, run
//! configuration and JSON persistence of selections and reports.
//!
//! Embedding and query files hold one JSON object per line:
//!
//! ```text
//! {"id":"a","vector":[3,1],"text":"optional source text"}
//! ```

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algorithms::{CandidateSet, EmbeddingRecord, Query, SelectionResult};
use crate::error::{Error, Result};
use crate::metrics::{AlgorithmSpec, EvaluationReport};
use crate::veccore::{self, Vector};

/// Pool size used when none is configured.
pub const DEFAULT_POOL_SIZE: usize = 20;

#[derive(Debug, Deserialize)]
struct RawRecord {
    id: String,
    vector: Vec<f64>,
    #[serde(default)]
    text: Option<String>,
}

#[derive(Serialize)]
struct RecordLine<'a> {
    id: &'a str,
    vector: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    text: Option<&'a str>,
}

/// Parses a JSONL file into records, enforcing uniform dimension, non-zero
/// norms and unique ids. Blank lines are skipped.
fn read_records(path: &Path, normalize: bool) -> Result<Vec<EmbeddingRecord>> {
    let body = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_owned(),
        line,
        message,
    };
    let mut records = Vec::new();
    let mut first: Option<(usize, usize)> = None;
    let mut seen = std::collections::HashSet::new();
    for (i, text) in body.lines().enumerate() {
        let line = i + 1;
        if text.trim().is_empty() {
            continue;
        }
        let raw: RawRecord =
            serde_json::from_str(text).map_err(|e| parse_err(line, e.to_string()))?;
        if raw.id.is_empty() {
            return Err(parse_err(line, "empty id".into()));
        }
        let vector = Vector::new(raw.vector).map_err(|e| parse_err(line, e.to_string()))?;
        match first {
            None => first = Some((line, vector.dim())),
            Some((first_line, expected)) if expected != vector.dim() => {
                return Err(Error::LineDimensionMismatch {
                    path: path.to_owned(),
                    first_line,
                    expected,
                    line,
                    found: vector.dim(),
                })
            }
            Some(_) => {}
        }
        if veccore::norm(&vector) == 0.0 {
            return Err(Error::ZeroNormRecord {
                path: path.to_owned(),
                line,
            });
        }
        let vector = if normalize {
            veccore::normalize(&vector)?
        } else {
            vector
        };
        if !seen.insert(raw.id.clone()) {
            return Err(parse_err(line, format!("duplicate id {:?}", raw.id)));
        }
        records.push(EmbeddingRecord::new(raw.id, vector, raw.text)?);
    }
    if records.is_empty() {
        return Err(parse_err(0, "no records".into()));
    }
    Ok(records)
}

pub fn load_embeddings(path: impl AsRef<Path>, normalize: bool) -> Result<CandidateSet> {
    CandidateSet::new(read_records(path.as_ref(), normalize)?)
}

/// Queries share the embedding line format; `text` is ignored.
pub fn load_queries(path: impl AsRef<Path>, normalize: bool) -> Result<Vec<Query>> {
    read_records(path.as_ref(), normalize)?
        .into_iter()
        .map(|r| Query::new(r.id, r.vector))
        .collect()
}

fn write_lines<'a, I>(path: &Path, lines: I) -> Result<()>
where
    I: IntoIterator<Item = RecordLine<'a>>,
{
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for line in lines {
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_embeddings(path: impl AsRef<Path>, cands: &CandidateSet) -> Result<()> {
    write_lines(
        path.as_ref(),
        cands.records().iter().map(|r| RecordLine {
            id: &r.id,
            vector: &r.vector,
            text: r.payload.as_deref(),
        }),
    )
}

pub fn write_queries(path: impl AsRef<Path>, queries: &[Query]) -> Result<()> {
    write_lines(
        path.as_ref(),
        queries.iter().map(|q| RecordLine {
            id: &q.id,
            vector: &q.vector,
            text: None,
        }),
    )
}

/// Parameters of the seeded synthetic corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub num_records: usize,
    pub dimension: usize,
    pub pool_size: usize,
    /// Standard deviation of the tangent-space Gaussian around the query.
    pub cluster_spread: f64,
    /// Fraction of records drawn uniformly on the sphere instead.
    pub distractor_fraction: f64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.num_records == 0 {
            return bad("num_records must be positive".into());
        }
        if self.dimension < 2 {
            return bad(format!(
                "dimension must be at least 2, got {}",
                self.dimension
            ));
        }
        if self.pool_size == 0 || self.pool_size > self.num_records {
            return bad(format!(
                "pool size {} must lie in 1..={}",
                self.pool_size, self.num_records
            ));
        }
        if !(self.cluster_spread > 0.0 && self.cluster_spread.is_finite()) {
            return bad(format!(
                "cluster_spread must be positive, got {}",
                self.cluster_spread
            ));
        }
        if !(0.0..=1.0).contains(&self.distractor_fraction) {
            return bad(format!(
                "distractor_fraction must lie in [0, 1], got {}",
                self.distractor_fraction
            ));
        }
        Ok(())
    }

    /// Number of records clustered around a query.
    pub fn clustered_count(&self) -> usize {
        ((1.0 - self.distractor_fraction) * self.num_records as f64).round() as usize
    }
}

fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

fn unit_gaussian(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let g = gaussian(rng, d);
        if let Ok(v) = veccore::normalize(&g) {
            return v.into_inner();
        }
    }
}

/// Unit vector obtained by a Gaussian step of scale `spread` in the tangent
/// space at `center`, then renormalised.
fn perturb(rng: &mut ChaCha8Rng, center: &[f64], spread: f64) -> Vec<f64> {
    loop {
        let g = gaussian(rng, center.len());
        let along = veccore::dot_unchecked(&g, center);
        let v: Vec<f64> = center
            .iter()
            .zip(&g)
            .map(|(c, x)| c + spread * (x - along * c))
            .collect();
        if let Ok(u) = veccore::normalize(&v) {
            return u.into_inner();
        }
    }
}

/// Corpus of `num_records` unit vectors around `num_queries` random unit
/// queries. The RNG stream draws the queries first, then records in id
/// order; clustered records come first and cycle through the queries, the
/// remaining records are uniform on the sphere.
pub fn generate_corpus(
    spec: &SyntheticSpec,
    num_queries: usize,
) -> Result<(CandidateSet, Vec<Query>)> {
    spec.validate()?;
    if num_queries == 0 {
        return Err(Error::InvalidSpec("at least one query is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d = spec.dimension;
    let centers: Vec<Vec<f64>> = (0..num_queries)
        .map(|_| unit_gaussian(&mut rng, d))
        .collect();
    let clustered = spec.clustered_count();
    let records = (0..spec.num_records)
        .map(|i| {
            let v = if i < clustered {
                perturb(&mut rng, &centers[i % num_queries], spec.cluster_spread)
            } else {
                unit_gaussian(&mut rng, d)
            };
            EmbeddingRecord::new(format!("r{i:04}"), Vector::new(v)?, None)
        })
        .collect::<Result<Vec<_>>>()?;
    let queries = centers
        .into_iter()
        .enumerate()
        .map(|(j, c)| Query::from_vec(format!("q{j:04}"), c))
        .collect::<Result<Vec<_>>>()?;
    Ok((CandidateSet::new(records)?, queries))
}

/// Single-query corpus; a pure function of `spec`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(CandidateSet, Query)> {
    let (cands, mut queries) = generate_corpus(spec, 1)?;
    Ok((cands, queries.remove(0)))
}

/// Settings for an evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub k: usize,
    #[serde(default = "default_pool_size")]
    pub n: usize,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default)]
    pub normalize_on_load: bool,
    pub embeddings_path: PathBuf,
    pub queries_path: PathBuf,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

fn default_pool_size() -> usize {
    DEFAULT_POOL_SIZE
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::ZeroK);
        }
        if self.k > self.n {
            return Err(Error::InvalidConfig(format!(
                "k = {} exceeds pool size n = {}",
                self.k, self.n
            )));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidConfig("no algorithms configured".into()));
        }
        Ok(())
    }
}

pub fn save_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut body = serde_json::to_string_pretty(value)?;
    body.push('\n');
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

pub fn load_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let body = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&body)?)
}

pub fn save_report(report: &EvaluationReport, path: impl AsRef<Path>) -> Result<()> {
    save_json(report, path)
}

pub fn load_report(path: impl AsRef<Path>) -> Result<EvaluationReport> {
    load_json(path)
}

pub fn save_selection(result: &SelectionResult, path: impl AsRef<Path>) -> Result<()> {
    save_json(result, path)
}

pub fn load_selection(path: impl AsRef<Path>) -> Result<SelectionResult> {
    load_json(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    fn spec(seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            seed,
            num_records: 100,
            dimension: 16,
            pool_size: 20,
            cluster_spread: 0.3,
            distractor_fraction: 0.5,
        }
    }

    #[test]
    fn loads_records() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "e.jsonl",
            "{\"id\":\"a\",\"vector\":[3,1]}\n\n{\"id\":\"b\",\"vector\":[0.5,-2],\"text\":\"hello\"}\n",
        );
        let set = load_embeddings(&p, false).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.id(0), "a");
        assert_eq!(set.vector(0), &[3.0, 1.0]);
        assert_eq!(set.records()[1].payload.as_deref(), Some("hello"));

        let normed = load_embeddings(&p, true).unwrap();
        assert!((veccore::norm(normed.vector(0)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "e.jsonl",
            "{\"id\":\"a\",\"vector\":[3,1]}\n{\"id\":\"b\"}\n",
        );
        match load_embeddings(&p, false) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("vector"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }

        let p = write(
            &dir,
            "m.jsonl",
            "{\"id\":\"a\",\"vector\":[3,1]}\n{\"id\":\"b\",\"vector\":[1,2,3]}\n",
        );
        match load_embeddings(&p, false) {
            Err(e @ Error::LineDimensionMismatch { .. }) => {
                let Error::LineDimensionMismatch {
                    first_line,
                    line,
                    expected,
                    found,
                    ..
                } = e
                else {
                    unreachable!()
                };
                assert_eq!((first_line, line, expected, found), (1, 2, 2, 3));
            }
            other => panic!("unexpected {other:?}"),
        }

        let p = write(
            &dir,
            "z.jsonl",
            "{\"id\":\"a\",\"vector\":[3,1]}\n{\"id\":\"z\",\"vector\":[0,0]}\n",
        );
        assert!(matches!(
            load_embeddings(&p, false),
            Err(Error::ZeroNormRecord { line: 2, .. })
        ));

        let p = write(
            &dir,
            "d.jsonl",
            "{\"id\":\"a\",\"vector\":[3,1]}\n{\"id\":\"a\",\"vector\":[1,1]}\n",
        );
        assert!(matches!(
            load_embeddings(&p, false),
            Err(Error::Parse { line: 2, .. })
        ));

        let p = write(&dir, "empty.jsonl", "\n");
        assert!(load_embeddings(&p, false).is_err());
        assert!(matches!(
            load_embeddings(dir.path().join("missing.jsonl"), false),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn synthetic_is_deterministic() {
        let a = generate_synthetic(&spec(7)).unwrap();
        let b = generate_synthetic(&spec(7)).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic(&spec(8)).unwrap();
        assert_ne!(a.0, c.0);
        assert_eq!(a.0.id(0), "r0000");
        assert_eq!(a.0.id(99), "r0099");
        for r in a.0.records() {
            assert_eq!(r.vector.dim(), 16);
            assert!((veccore::norm(&r.vector) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn clustered_records_sit_near_the_query() {
        let s = SyntheticSpec {
            distractor_fraction: 0.0,
            ..spec(3)
        };
        let (cands, q) = generate_synthetic(&s).unwrap();
        let mean_cos: f64 = cands
            .records()
            .iter()
            .map(|r| veccore::cosine(&r.vector, &q.vector).unwrap())
            .sum::<f64>()
            / cands.len() as f64;
        // |tangent step| ~ 0.3 * sqrt(15), so cos ~ 1 / sqrt(1 + 1.35)
        assert!(mean_cos > 0.5 && mean_cos < 0.8, "{mean_cos}");

        let s = SyntheticSpec {
            distractor_fraction: 1.0,
            ..spec(3)
        };
        let (cands, q) = generate_synthetic(&s).unwrap();
        let mean_cos: f64 = cands
            .records()
            .iter()
            .map(|r| veccore::cosine(&r.vector, &q.vector).unwrap())
            .sum::<f64>()
            / cands.len() as f64;
        assert!(mean_cos.abs() < 0.1, "{mean_cos}");
    }

    #[test]
    fn spec_validation() {
        assert!(SyntheticSpec {
            dimension: 1,
            ..spec(0)
        }
        .validate()
        .is_err());
        assert!(SyntheticSpec {
            pool_size: 101,
            ..spec(0)
        }
        .validate()
        .is_err());
        assert!(SyntheticSpec {
            cluster_spread: 0.0,
            ..spec(0)
        }
        .validate()
        .is_err());
        assert!(SyntheticSpec {
            distractor_fraction: 1.5,
            ..spec(0)
        }
        .validate()
        .is_err());
        assert!(generate_corpus(&spec(0), 0).is_err());
    }

    #[test]
    fn embeddings_round_trip_through_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let (cands, q) = generate_synthetic(&spec(11)).unwrap();
        let p = dir.path().join("e.jsonl");
        write_embeddings(&p, &cands).unwrap();
        assert_eq!(load_embeddings(&p, false).unwrap(), cands);
        let qp = dir.path().join("q.jsonl");
        write_queries(&qp, std::slice::from_ref(&q)).unwrap();
        assert_eq!(load_queries(&qp, false).unwrap(), vec![q]);
    }

    #[test]
    fn report_and_selection_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let report = EvaluationReport {
            challenger_tag: "vrsd".into(),
            baseline_tag: "mmr(lambda=0.5)".into(),
            num_queries: 3,
            win_rate: 2.0 / 3.0,
            tie_rate: 1.0 / 3.0,
            max_diff: 0.1 + 0.2,
            mean_by_algorithm: BTreeMap::from([
                ("vrsd".into(), 0.7123456789012345),
                ("mmr(lambda=0.5)".into(), 1e-300),
            ]),
        };
        let p = dir.path().join("r.json");
        save_report(&report, &p).unwrap();
        let body = fs::read_to_string(&p).unwrap();
        for key in [
            "\"win_rate\"",
            "\"tie_rate\"",
            "\"max_diff\"",
            "\"mean_by_algorithm\"",
        ] {
            assert!(body.contains(key));
        }
        assert_eq!(load_report(&p).unwrap(), report);

        let (cands, q) = generate_synthetic(&spec(5)).unwrap();
        let sel = crate::vrsd_select(&cands, &q, 4).unwrap();
        let p = dir.path().join("s.json");
        save_selection(&sel, &p).unwrap();
        let body = fs::read_to_string(&p).unwrap();
        for key in [
            "\"steps\"",
            "\"candidates_scanned\"",
            "\"candidate_evaluations\"",
        ] {
            assert!(body.contains(key));
        }
        assert_eq!(load_selection(&p).unwrap(), sel);
    }

    #[test]
    fn run_config_defaults_and_validation() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"k":5,"algorithms":[{"algorithm":"vrsd"},{"algorithm":"mmr","lambda":0.5}],
                "embeddings_path":"e.jsonl","queries_path":"q.jsonl"}"#,
        )
        .unwrap();
        assert_eq!(cfg.n, DEFAULT_POOL_SIZE);
        assert!(!cfg.normalize_on_load);
        assert_eq!(cfg.algorithms[1], AlgorithmSpec::Mmr { lambda: 0.5 });
        cfg.validate().unwrap();
        assert!(RunConfig {
            k: 21,
            ..cfg.clone()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            k: 0,
            ..cfg.clone()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            algorithms: vec![],
            ..cfg
        }
        .validate()
        .is_err());
    }
}
