use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum DbsError {
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("matrix is not symmetric: D[{i}][{j}] = {a} but D[{j}][{i}] = {b}")]
    Asymmetric { i: usize, j: usize, a: f64, b: f64 },

    #[error("invalid dissimilarity matrix: {0}")]
    InvalidMatrix(String),

    #[error("all pairwise distances are zero")]
    AllZeroDistances,

    #[error("at least 3 points are required, got {0}")]
    TooFewPoints(usize),

    #[error("{n} points exceed the configured hard cap of {cap}; subsample the data or raise the cap")]
    TooManyPoints { n: usize, cap: usize },

    #[error("unknown dataset name `{0}`")]
    UnknownDataset(String),

    #[error("invalid number of clusters k = {k} for {n} points")]
    InvalidK { k: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph is disconnected: {components} components (first vertices: {examples:?})")]
    Disconnected {
        components: usize,
        examples: Vec<usize>,
    },

    #[error("vertex {0} has no neighbors")]
    IsolatedVertex(usize),

    #[error("empty input")]
    Empty,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("png encoding failed: {0}")]
    Png(String),
}

pub type Result<T> = std::result::Result<T, DbsError>;
