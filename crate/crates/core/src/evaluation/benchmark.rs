use std::collections::HashSet;
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{baseline_kmeans, baseline_single_linkage, baseline_ward, best_permutation_accuracy, f1_score};
use crate::clustering::ClusterMode;
use crate::data::{euclidean_dissimilarity, fcps::generate_fcps, io::load_dataset, Dataset, FcpsName};
use crate::error::{DbsError, Result};
use crate::pipeline::DbsModel;
use crate::pswarm::PswarmParams;

pub const DEFAULT_TRIALS: usize = 10;
/// Error level attributable to chance, drawn as a reference line.
pub const CHANCE_LINE: f64 = 0.5;
pub const RESULTS_FILE: &str = "results.jsonl";
pub const SUMMARY_FILE: &str = "summary.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "dbs-connected")]
    DbsConnected,
    #[serde(rename = "dbs-compact")]
    DbsCompact,
    #[serde(rename = "kmeans")]
    KMeans,
    #[serde(rename = "single-linkage")]
    SingleLinkage,
    #[serde(rename = "ward")]
    Ward,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::DbsConnected,
        Algorithm::DbsCompact,
        Algorithm::KMeans,
        Algorithm::SingleLinkage,
        Algorithm::Ward,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::DbsConnected => "dbs-connected",
            Algorithm::DbsCompact => "dbs-compact",
            Algorithm::KMeans => "kmeans",
            Algorithm::SingleLinkage => "single-linkage",
            Algorithm::Ward => "ward",
        }
    }

    pub fn dbs(mode: ClusterMode) -> Self {
        match mode {
            ClusterMode::Connected => Algorithm::DbsConnected,
            ClusterMode::Compact => Algorithm::DbsCompact,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = DbsError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| DbsError::InvalidParameter(format!("unknown algorithm {s:?}")))
    }
}

/// One row of the suite: a dataset, the algorithms to run on it and the
/// trial seeds. `dataset` is an FCPS name unless `path` points at a CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub dataset: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub algorithms: Vec<Algorithm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSuite {
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub entries: Vec<SuiteEntry>,
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

impl BenchmarkSuite {
    pub fn from_json(text: &str) -> Result<Self> {
        let suite: Self = serde_json::from_str(text)?;
        suite.validate()?;
        Ok(suite)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Overrides the trial count of every entry without explicit seeds.
    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        for e in &mut self.entries {
            e.trials = None;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        for e in &self.entries {
            if e.algorithms.is_empty() {
                return Err(DbsError::InvalidParameter(format!("{}: no algorithms", e.dataset)));
            }
            let seeds = self.seeds(e);
            if seeds.is_empty() {
                return Err(DbsError::InvalidParameter(format!("{}: no trials", e.dataset)));
            }
            if seeds.iter().collect::<HashSet<_>>().len() != seeds.len() {
                return Err(DbsError::InvalidParameter(format!("{}: seeds must be distinct", e.dataset)));
            }
            if e.path.is_none() {
                e.dataset.parse::<FcpsName>()?;
            }
        }
        Ok(())
    }

    /// The entry's explicit seeds, or `1..=trials`.
    pub fn seeds(&self, e: &SuiteEntry) -> Vec<u64> {
        match &e.seeds {
            Some(s) => s.clone(),
            None => (1..=e.trials.unwrap_or(self.trials) as u64).collect(),
        }
    }
}

/// Outcome of one (dataset, algorithm, seed) run. Metrics are absent when
/// the trial failed, in which case `failure` holds the message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub k: usize,
    pub error_rate: Option<f64>,
    pub f1: Option<f64>,
    pub runtime_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl TrialReport {
    pub fn key(&self) -> (String, Algorithm, u64) {
        (self.dataset.clone(), self.algorithm, self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub failed: usize,
    pub median_error: f64,
    pub q1_error: f64,
    pub q3_error: f64,
    pub median_f1: f64,
    pub median_runtime_s: f64,
    /// Median error at or above the chance line.
    pub at_chance: bool,
}

#[derive(Debug, Clone)]
pub struct BenchmarkOutcome {
    pub reports: Vec<TrialReport>,
    pub summary: Vec<SummaryRow>,
    /// Trials actually run (the rest were already in the results file).
    pub executed: usize,
}

fn entry_dataset(e: &SuiteEntry, seed: u64) -> Result<Dataset> {
    match &e.path {
        Some(p) => Ok(load_dataset(p)?.with_name(e.dataset.clone())),
        None => Ok(generate_fcps(e.dataset.parse()?, seed)),
    }
}

fn entry_k(e: &SuiteEntry, ds: &Dataset) -> Result<usize> {
    if let Some(k) = e.k {
        return Ok(k);
    }
    if let Ok(name) = e.dataset.parse::<FcpsName>() {
        if let Some(k) = name.classes() {
            return Ok(k);
        }
    }
    match ds.labels() {
        Some(l) => Ok(l.iter().collect::<HashSet<_>>().len()),
        None => Err(DbsError::InvalidParameter(format!("{}: no k and no labels", e.dataset))),
    }
}

/// Runs a single trial and returns the predicted labels.
pub fn run_trial(ds: &Dataset, algorithm: Algorithm, k: usize, seed: u64) -> Result<Vec<usize>> {
    run_trial_cached(ds, algorithm, k, seed, &mut None)
}

// Both DBS modes of one dataset and seed share a projection.
fn run_trial_cached(
    ds: &Dataset,
    algorithm: Algorithm,
    k: usize,
    seed: u64,
    model: &mut Option<DbsModel>,
) -> Result<Vec<usize>> {
    let mode = match algorithm {
        Algorithm::DbsConnected => ClusterMode::Connected,
        Algorithm::DbsCompact => ClusterMode::Compact,
        Algorithm::KMeans => return baseline_kmeans(ds, k, seed),
        Algorithm::SingleLinkage => return baseline_single_linkage(&euclidean_dissimilarity(ds), k),
        Algorithm::Ward => return baseline_ward(&euclidean_dissimilarity(ds), k),
    };
    if model.is_none() {
        *model = Some(DbsModel::build(euclidean_dissimilarity(ds), &PswarmParams::default(), seed)?);
    }
    Ok(model.as_ref().unwrap().cluster(k, mode)?.labels)
}

fn score(ds: &Dataset, labels: &[usize]) -> Result<(f64, f64)> {
    let truth = ds
        .labels()
        .ok_or_else(|| DbsError::InvalidDataset(format!("{} has no labels to score against", ds.name)))?;
    Ok((1.0 - best_permutation_accuracy(labels, truth)?, f1_score(labels, truth)?))
}

pub fn read_reports(path: impl AsRef<Path>) -> Result<Vec<TrialReport>> {
    let path = path.as_ref();
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

/// Runs every trial of `suite` not yet recorded in `out_dir/results.jsonl`,
/// appending one report per line, then rewrites `summary.csv` from all
/// recorded reports.
pub fn run_benchmark(suite: &BenchmarkSuite, out_dir: impl AsRef<Path>) -> Result<BenchmarkOutcome> {
    suite.validate()?;
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir)?;
    let results_path = out_dir.join(RESULTS_FILE);
    let mut reports = read_reports(&results_path)?;
    let done: HashSet<_> = reports.iter().map(TrialReport::key).collect();
    let mut file = OpenOptions::new().create(true).append(true).open(&results_path)?;
    let mut executed = 0;
    for e in &suite.entries {
        for seed in suite.seeds(e) {
            let pending: Vec<Algorithm> = e
                .algorithms
                .iter()
                .copied()
                .filter(|&a| !done.contains(&(e.dataset.clone(), a, seed)))
                .collect();
            if pending.is_empty() {
                continue;
            }
            let ds = entry_dataset(e, seed);
            let k = ds.as_ref().ok().and_then(|ds| entry_k(e, ds).ok()).or(e.k).unwrap_or(0);
            let mut model = None;
            for a in pending {
                let start = Instant::now();
                let outcome = ds
                    .as_ref()
                    .map_err(|err| DbsError::InvalidDataset(err.to_string()))
                    .and_then(|ds| {
                        let k = entry_k(e, ds)?;
                        let labels = run_trial_cached(ds, a, k, seed, &mut model)?;
                        score(ds, &labels)
                    });
                let runtime_s = start.elapsed().as_secs_f64();
                let report = match outcome {
                    Ok((err, f1)) => TrialReport {
                        dataset: e.dataset.clone(),
                        algorithm: a,
                        seed,
                        k,
                        error_rate: Some(err),
                        f1: Some(f1),
                        runtime_s,
                        failure: None,
                    },
                    Err(err) => {
                        log::warn!("{} / {a} / seed {seed} failed: {err}", e.dataset);
                        TrialReport {
                            dataset: e.dataset.clone(),
                            algorithm: a,
                            seed,
                            k,
                            error_rate: None,
                            f1: None,
                            runtime_s,
                            failure: Some(err.to_string()),
                        }
                    }
                };
                log::info!(
                    "{} {} seed {} error {:?} ({:.2}s)",
                    report.dataset,
                    report.algorithm,
                    seed,
                    report.error_rate,
                    runtime_s
                );
                writeln!(file, "{}", serde_json::to_string(&report)?)?;
                file.flush()?;
                reports.push(report);
                executed += 1;
            }
        }
    }
    let summary = summarize(&reports);
    write_summary(out_dir.join(SUMMARY_FILE), &summary)?;
    Ok(BenchmarkOutcome {
        reports,
        summary,
        executed,
    })
}

/// Median and quartiles per (dataset, algorithm), in first-seen order.
pub fn summarize(reports: &[TrialReport]) -> Vec<SummaryRow> {
    let mut cells: Vec<(String, Algorithm)> = Vec::new();
    for r in reports {
        let key = (r.dataset.clone(), r.algorithm);
        if !cells.contains(&key) {
            cells.push(key);
        }
    }
    cells
        .into_iter()
        .map(|(dataset, algorithm)| {
            let rs: Vec<&TrialReport> = reports
                .iter()
                .filter(|r| r.dataset == dataset && r.algorithm == algorithm)
                .collect();
            let errors: Vec<f64> = rs.iter().filter_map(|r| r.error_rate).collect();
            let f1s: Vec<f64> = rs.iter().filter_map(|r| r.f1).collect();
            let times: Vec<f64> = rs.iter().map(|r| r.runtime_s).collect();
            let median_error = quantile(&errors, 0.5);
            SummaryRow {
                dataset,
                algorithm,
                trials: rs.len(),
                failed: rs.iter().filter(|r| r.failure.is_some()).count(),
                median_error,
                q1_error: quantile(&errors, 0.25),
                q3_error: quantile(&errors, 0.75),
                median_f1: quantile(&f1s, 0.5),
                median_runtime_s: quantile(&times, 0.5),
                at_chance: median_error >= CHANCE_LINE,
            }
        })
        .collect()
}

/// Linear-interpolation quantile; NaN for an empty sample.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    crate::data::percentile(values, q)
}

pub fn write_summary(path: impl AsRef<Path>, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| DbsError::Io(e.into()))?;
    w.write_record([
        "dataset",
        "algorithm",
        "trials",
        "failed",
        "median_error",
        "q1_error",
        "q3_error",
        "median_f1",
        "median_runtime_s",
        "chance_line",
        "at_chance",
    ])
    .map_err(|e| DbsError::Io(e.into()))?;
    for r in rows {
        w.write_record([
            r.dataset.clone(),
            r.algorithm.to_string(),
            r.trials.to_string(),
            r.failed.to_string(),
            format!("{:.6}", r.median_error),
            format!("{:.6}", r.q1_error),
            format!("{:.6}", r.q3_error),
            format!("{:.6}", r.median_f1),
            format!("{:.3}", r.median_runtime_s),
            CHANCE_LINE.to_string(),
            r.at_chance.to_string(),
        ])
        .map_err(|e| DbsError::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_parsing_and_defaults() {
        let s = BenchmarkSuite::from_json(
            r#"{"entries":[{"dataset":"Hepta","k":7,"algorithms":["dbs-compact","kmeans"]},
                {"dataset":"Target","algorithms":["single-linkage"],"seeds":[4,9]}]}"#,
        )
        .unwrap();
        assert_eq!(s.trials, DEFAULT_TRIALS);
        assert_eq!(s.seeds(&s.entries[0]), (1..=10).collect::<Vec<u64>>());
        assert_eq!(s.seeds(&s.entries[1]), vec![4, 9]);
    }

    #[test]
    fn suite_validation() {
        let dup = r#"{"entries":[{"dataset":"Hepta","algorithms":["kmeans"],"seeds":[1,1]}]}"#;
        assert!(BenchmarkSuite::from_json(dup).is_err());
        let unknown = r#"{"entries":[{"dataset":"Nope","algorithms":["kmeans"]}]}"#;
        assert!(BenchmarkSuite::from_json(unknown).is_err());
        let bad_algo = r#"{"entries":[{"dataset":"Hepta","algorithms":["pam"]}]}"#;
        assert!(BenchmarkSuite::from_json(bad_algo).is_err());
    }

    #[test]
    fn quartiles_of_samples() {
        let rs: Vec<TrialReport> = [0.1, 0.3, 0.2, 0.6]
            .iter()
            .enumerate()
            .map(|(i, &e)| TrialReport {
                dataset: "X".into(),
                algorithm: Algorithm::KMeans,
                seed: i as u64,
                k: 2,
                error_rate: Some(e),
                f1: Some(1.0 - e),
                runtime_s: 1.0,
                failure: None,
            })
            .collect();
        let s = summarize(&rs);
        assert_eq!(s.len(), 1);
        assert!((s[0].median_error - 0.25).abs() < 1e-15);
        assert!((s[0].q1_error - 0.175).abs() < 1e-15);
        assert!((s[0].q3_error - 0.375).abs() < 1e-15);
        assert!(!s[0].at_chance);
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
            assert_eq!(serde_json::to_string(&a).unwrap(), format!("\"{a}\""));
        }
    }
}
