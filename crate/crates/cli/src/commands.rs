//! One function per subcommand. Each returns its artifacts so the binary
//! only has to print.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use dbs_core::clustering::{ClusterMode, ClusterResult};
use dbs_core::data::io::save_dataset;
use dbs_core::data::{fcps::generate_fcps_sized, FcpsName};
use dbs_core::evaluation::benchmark::{run_benchmark, BenchmarkOutcome, BenchmarkSuite};
use dbs_core::evaluation::best_permutation_accuracy;
use dbs_core::pswarm::{pswarm_project_with, PswarmParams};

use crate::error::{CliError, Result};
use crate::manifest::{
    sha256_hex, timestamp, Input, InputRecord, ProjectionDir, RunManifest, StageVersions, CLUSTERS_FILE, INPUT_FILE,
    MANIFEST_FILE, PROJECTION_FILE, TOPOMAP_JSON_FILE, TOPOMAP_PNG_FILE,
};

pub const DEFAULT_PNG_SCALE: usize = 4;

pub fn generate(name: FcpsName, seed: u64, n: Option<usize>, out: &Path) -> Result<usize> {
    let ds = generate_fcps_sized(name, n.unwrap_or(name.default_size()), seed);
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    save_dataset(out, &ds)?;
    Ok(ds.len())
}

/// Projects `input` and writes `projection.json`, `manifest.json` and a copy
/// of the input into `out`.
pub fn project(input: &Path, seed: u64, params: &PswarmParams, out: &Path) -> Result<RunManifest> {
    let started_at = timestamp();
    let (parsed, bytes) = Input::load(input)?;
    let projection = pswarm_project_with(&parsed.dissimilarity(), params, seed)?;
    fs::create_dir_all(out)?;
    fs::write(out.join(INPUT_FILE), &bytes)?;
    fs::write(out.join(PROJECTION_FILE), projection.to_json())?;
    let manifest = RunManifest {
        input: InputRecord {
            path: input.display().to_string(),
            sha256: sha256_hex(&bytes),
            kind: parsed.kind(),
            n: parsed.len(),
        },
        seed,
        params: params.clone(),
        grid: projection.grid.clone(),
        stages: StageVersions::current(),
        started_at,
        finished_at: timestamp(),
    };
    fs::write(out.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

/// Reruns the projection recorded in `dir` into `out` and reports whether
/// the new `projection.json` is byte-identical.
pub fn reproduce(dir: &Path, out: &Path) -> Result<bool> {
    let original = ProjectionDir::open(dir)?;
    let m = &original.manifest;
    project(&dir.join(INPUT_FILE), m.seed, &m.params, out)?;
    let again = fs::read_to_string(out.join(PROJECTION_FILE))?;
    Ok(again == original.projection_json)
}

#[derive(Debug, Clone)]
pub struct ClusterReport {
    pub result: ClusterResult,
    /// Best-permutation accuracy against the input labels, when present.
    pub accuracy: Option<f64>,
    pub path: PathBuf,
}

pub fn cluster(dir: &Path, k: usize, mode: ClusterMode, out: Option<&Path>) -> Result<ClusterReport> {
    let pd = ProjectionDir::open(dir)?;
    let result = pd.model()?.cluster(k, mode)?;
    let accuracy = match pd.input.labels() {
        Some(truth) => Some(best_permutation_accuracy(&result.labels, truth)?),
        None => None,
    };
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| dir.join(CLUSTERS_FILE));
    fs::write(&path, serde_json::to_string_pretty(&result)?)?;
    Ok(ClusterReport { result, accuracy, path })
}

/// Writes `topomap.json` and `topomap.png` into `dir`.
pub fn map(dir: &Path, scale: usize) -> Result<(PathBuf, PathBuf)> {
    if scale == 0 {
        return Err(CliError::artifact(dir, "png scale must be at least 1"));
    }
    let pd = ProjectionDir::open(dir)?;
    let model = pd.model()?;
    let json = dir.join(TOPOMAP_JSON_FILE);
    fs::write(&json, model.topomap().to_json())?;
    let png = dir.join(TOPOMAP_PNG_FILE);
    model.topomap().write_png(BufWriter::new(fs::File::create(&png)?), scale)?;
    Ok((json, png))
}

pub fn bench(suite: &Path, trials: Option<usize>, out: &Path) -> Result<BenchmarkOutcome> {
    let mut suite = BenchmarkSuite::load(suite)?;
    if let Some(t) = trials {
        suite = suite.with_trials(t);
    }
    Ok(run_benchmark(&suite, out)?)
}
