//! Scoring against ground truth, contrast baselines and the multi-trial
//! benchmark harness.

mod baselines;
pub mod benchmark;
mod scoring;

pub use baselines::{baseline_kmeans, baseline_single_linkage, baseline_ward, KMEANS_MAX_ITER};
pub use benchmark::{run_benchmark, Algorithm, BenchmarkOutcome, BenchmarkSuite, SuiteEntry, SummaryRow, TrialReport};
pub use scoring::{
    best_assignment, best_permutation_accuracy, error_rate, exhaustive_assignment, f1_from_counts, f1_score,
    hungarian_assignment, Confusion, EXHAUSTIVE_LIMIT,
};
