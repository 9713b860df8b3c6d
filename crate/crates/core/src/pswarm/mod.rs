//! The polar swarm projection.
//!
//! Every data point is a bot on the toroidal grid. A bot's payoff (scent) is
//! an offset minus the neighbourhood-weighted mean of its input distances to
//! the bots around it, so bots gather next to similar bots. Each epoch is a
//! game at a fixed radius, played until global happiness stops changing;
//! then the radius shrinks by one, from `r_max` down to `r_min`.

pub mod annealing;
mod engine;

use serde::{Deserialize, Serialize};

pub use annealing::{chance, EpochExit};
pub use engine::{Cone, DataBot, EngineState, EpochLog, Neighborhood};

use crate::data::DissimilarityMatrix;
use crate::error::{DbsError, Result};
use crate::grid::{solve_grid_size, GridConfig, GridPos, DEFAULT_ALPHA, DEFAULT_BETA};

pub const PROJECTION_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PswarmParams {
    pub alpha: usize,
    pub beta: f64,
    /// Happiness change, relative to `S0`, that counts as "no change".
    pub tol_rel: f64,
    /// Consecutive flat iterations that end an epoch.
    pub patience: usize,
    /// Iteration cap per epoch, as a multiple of the number of points.
    pub max_iter_per_point: usize,
    pub max_points: usize,
}

impl Default for PswarmParams {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            tol_rel: 1e-4,
            patience: 3,
            max_iter_per_point: 50,
            max_points: 10_000,
        }
    }
}

/// Final bot positions on the grid plus the annealing log.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub grid: GridConfig,
    pub seed: u64,
    /// `positions[j]` is the cell of the bot carrying data row `j`.
    pub positions: Vec<GridPos>,
    pub epochs: Vec<EpochLog>,
}

impl Projection {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Cartesian coordinates in `[0, C) × [0, L·√3/2)`.
    pub fn coords(&self) -> Vec<(f64, f64)> {
        self.positions.iter().map(|p| p.to_cartesian()).collect()
    }

    pub fn safeguard_exits(&self) -> usize {
        self.epochs.iter().filter(|e| e.exit == EpochExit::Safeguard).count()
    }

    pub fn to_document(&self) -> ProjectionDocument {
        ProjectionDocument {
            version: PROJECTION_FORMAT_VERSION,
            seed: self.seed,
            grid: self.grid.clone(),
            bots: self
                .positions
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    let (x, y) = p.to_cartesian();
                    BotRecord {
                        data_index: j,
                        row: p.row,
                        col: p.col,
                        x,
                        y,
                    }
                })
                .collect(),
            epochs: self.epochs.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("projection serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ProjectionDocument = serde_json::from_str(text)?;
        Self::from_document(doc)
    }

    pub fn from_document(doc: ProjectionDocument) -> Result<Self> {
        if doc.version != PROJECTION_FORMAT_VERSION {
            return Err(DbsError::InvalidParameter(format!(
                "unsupported projection version {}",
                doc.version
            )));
        }
        let n = doc.bots.len();
        let mut positions = vec![None; n];
        for b in &doc.bots {
            if b.data_index >= n || b.row >= doc.grid.lines || b.col >= doc.grid.columns {
                return Err(DbsError::InvalidParameter(format!("bot record out of range: {b:?}")));
            }
            positions[b.data_index] = Some(GridPos::new(b.row, b.col));
        }
        let positions = positions
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| DbsError::InvalidParameter("duplicate data_index in projection".into()))?;
        Ok(Self {
            grid: doc.grid,
            seed: doc.seed,
            positions,
            epochs: doc.epochs,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionDocument {
    pub version: u32,
    pub seed: u64,
    pub grid: GridConfig,
    pub bots: Vec<BotRecord>,
    pub epochs: Vec<EpochLog>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BotRecord {
    pub data_index: usize,
    pub row: usize,
    pub col: usize,
    pub x: f64,
    pub y: f64,
}

/// Projects the objects of `d` onto an automatically sized toroidal grid.
pub fn pswarm_project(d: &DissimilarityMatrix, seed: u64) -> Result<Projection> {
    pswarm_project_with(d, &PswarmParams::default(), seed)
}

pub fn pswarm_project_with(d: &DissimilarityMatrix, params: &PswarmParams, seed: u64) -> Result<Projection> {
    pswarm_project_traced(d, params, seed, |_| {})
}

/// Like [`pswarm_project_with`], calling `on_iteration` after every iteration.
pub fn pswarm_project_traced(
    d: &DissimilarityMatrix,
    params: &PswarmParams,
    seed: u64,
    on_iteration: impl FnMut(&EngineState<'_>),
) -> Result<Projection> {
    let n = d.len();
    if n < 3 {
        return Err(DbsError::TooFewPoints(n));
    }
    if n > params.max_points {
        return Err(DbsError::TooManyPoints {
            n,
            cap: params.max_points,
        });
    }
    let grid = solve_grid_size(&d.stats(), n, params.alpha, params.beta)?;
    let mut state = EngineState::new(d, grid.clone(), seed);
    let epochs = state.anneal(params, on_iteration);
    Ok(Projection {
        grid,
        seed,
        positions: state.positions().to_vec(),
        epochs,
    })
}
