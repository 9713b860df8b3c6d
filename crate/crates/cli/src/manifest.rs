//! Run manifests and the on-disk layout of a projection directory.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use dbs_core::data::io::{looks_like_matrix, read_dataset, read_dissimilarity};
use dbs_core::data::{euclidean_dissimilarity, Dataset, DissimilarityMatrix};
use dbs_core::grid::GridConfig;
use dbs_core::pswarm::{Projection, PswarmParams, PROJECTION_FORMAT_VERSION};
use dbs_core::topomap::TOPOMAP_FORMAT_VERSION;
use dbs_core::DbsModel;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const MANIFEST_VERSION: u32 = 1;

pub const PROJECTION_FILE: &str = "projection.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const INPUT_FILE: &str = "input.csv";
pub const CLUSTERS_FILE: &str = "clusters.json";
pub const TOPOMAP_JSON_FILE: &str = "topomap.json";
pub const TOPOMAP_PNG_FILE: &str = "topomap.png";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    Dataset,
    Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    /// Path as given on the command line.
    pub path: String,
    pub sha256: String,
    pub kind: InputKind,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageVersions {
    pub dbs_core: String,
    pub manifest: u32,
    pub projection: u32,
    pub topomap: u32,
}

impl StageVersions {
    pub fn current() -> Self {
        Self {
            dbs_core: env!("CARGO_PKG_VERSION").to_string(),
            manifest: MANIFEST_VERSION,
            projection: PROJECTION_FORMAT_VERSION,
            topomap: TOPOMAP_FORMAT_VERSION,
        }
    }
}

/// Everything needed to rerun a projection bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub input: InputRecord,
    pub seed: u64,
    pub params: PswarmParams,
    pub grid: GridConfig,
    pub stages: StageVersions,
    pub started_at: String,
    pub finished_at: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn timestamp() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Parsed input file: a labelled or unlabelled feature table, or a
/// headerless dissimilarity matrix.
#[derive(Debug, Clone)]
pub enum Input {
    Dataset(Dataset),
    Matrix(DissimilarityMatrix),
}

impl Input {
    pub fn parse(bytes: &[u8], name: &str) -> Result<Self> {
        let text = String::from_utf8_lossy(bytes);
        if looks_like_matrix(&text) {
            Ok(Input::Matrix(read_dissimilarity(bytes)?))
        } else {
            Ok(Input::Dataset(read_dataset(bytes, name)?))
        }
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>)> {
        let bytes = fs::read(path).map_err(|e| CliError::artifact(path, e.to_string()))?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("input");
        Ok((Self::parse(&bytes, name)?, bytes))
    }

    pub fn kind(&self) -> InputKind {
        match self {
            Input::Dataset(_) => InputKind::Dataset,
            Input::Matrix(_) => InputKind::Matrix,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Input::Dataset(ds) => ds.len(),
            Input::Matrix(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels(&self) -> Option<&[i64]> {
        match self {
            Input::Dataset(ds) => ds.labels(),
            Input::Matrix(_) => None,
        }
    }

    pub fn dissimilarity(&self) -> DissimilarityMatrix {
        match self {
            Input::Dataset(ds) => euclidean_dissimilarity(ds),
            Input::Matrix(d) => d.clone(),
        }
    }
}

/// A directory written by `dbs project`.
#[derive(Debug)]
pub struct ProjectionDir {
    pub root: PathBuf,
    pub manifest: RunManifest,
    pub input: Input,
    pub projection: Projection,
    /// Raw bytes of `projection.json`.
    pub projection_json: String,
}

impl ProjectionDir {
    /// Loads and cross-checks manifest, input copy and projection.
    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        let manifest_path = root.join(MANIFEST_FILE);
        let text = fs::read_to_string(&manifest_path).map_err(|e| CliError::artifact(&manifest_path, e.to_string()))?;
        let manifest: RunManifest = serde_json::from_str(&text)?;
        let input_path = root.join(INPUT_FILE);
        let (input, bytes) = Input::load(&input_path)?;
        let hash = sha256_hex(&bytes);
        if hash != manifest.input.sha256 {
            return Err(CliError::artifact(
                input_path,
                format!("sha256 {hash} does not match manifest {}", manifest.input.sha256),
            ));
        }
        let projection_path = root.join(PROJECTION_FILE);
        let projection_json =
            fs::read_to_string(&projection_path).map_err(|e| CliError::artifact(&projection_path, e.to_string()))?;
        let projection = Projection::from_json(&projection_json)?;
        if projection.len() != input.len() {
            return Err(CliError::artifact(
                projection_path,
                format!("{} bots for {} input objects", projection.len(), input.len()),
            ));
        }
        Ok(Self {
            root,
            manifest,
            input,
            projection,
            projection_json,
        })
    }

    pub fn model(&self) -> Result<DbsModel> {
        Ok(DbsModel::from_projection(self.input.dissimilarity(), self.projection.clone())?)
    }
}
