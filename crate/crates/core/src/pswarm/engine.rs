use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::annealing::{chance, run_until_plateau, EpochExit};
use super::PswarmParams;
use crate::data::DissimilarityMatrix;
use crate::grid::{cone_sq, GridConfig, GridPos, Torus};

/// Neighbourhood function turning a squared grid distance into a weight in [0, 1].
pub trait Neighborhood: Send + Sync {
    fn weight(&self, sq_dist: f64, radius: f64) -> f64;
}

/// The cone `1 - r²/(π Re²)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Cone;

impl Neighborhood for Cone {
    #[inline]
    fn weight(&self, sq_dist: f64, radius: f64) -> f64 {
        cone_sq(sq_dist, radius)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataBot {
    pub id: usize,
    pub pos: GridPos,
    /// Row of the dissimilarity matrix this bot stands for.
    pub data_ref: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub radius: usize,
    pub iterations: usize,
    pub final_happiness: f64,
    pub exit: EpochExit,
}

/// Mutable swarm state: bots on the torus, the current radius and the RNG.
pub struct EngineState<'a, H: Neighborhood = Cone> {
    d: &'a DissimilarityMatrix,
    cfg: GridConfig,
    torus: Torus,
    neighborhood: H,
    positions: Vec<GridPos>,
    occupancy: Vec<Option<u32>>,
    radius: usize,
    /// Neighbourhood weights for the current radius by (parity, d_row, d_col).
    weights: Vec<f64>,
    s0: f64,
    epoch: usize,
    happiness_history: Vec<f64>,
    rng: ChaCha8Rng,
    seed: u64,
    // scratch buffers reused across decisions
    free: Vec<GridPos>,
    candidates: Vec<GridPos>,
}

impl<'a> EngineState<'a, Cone> {
    /// Places `N` bots uniformly at random on distinct cells and freezes `S0`.
    pub fn new(d: &'a DissimilarityMatrix, cfg: GridConfig, seed: u64) -> Self {
        Self::with_neighborhood(d, cfg, seed, Cone)
    }

    /// Starts from explicit positions (seeded RNG still drives later moves).
    pub fn with_positions(d: &'a DissimilarityMatrix, cfg: GridConfig, positions: Vec<GridPos>, seed: u64) -> Self {
        Self::build(d, cfg, ChaCha8Rng::seed_from_u64(seed), seed, positions, Cone)
    }
}

impl<'a, H: Neighborhood> EngineState<'a, H> {
    pub fn with_neighborhood(d: &'a DissimilarityMatrix, cfg: GridConfig, seed: u64, neighborhood: H) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cells = index::sample(&mut rng, cfg.cells(), d.len());
        let positions = cells
            .iter()
            .map(|c| GridPos::new(c / cfg.columns, c % cfg.columns))
            .collect();
        Self::build(d, cfg, rng, seed, positions, neighborhood)
    }

    fn build(
        d: &'a DissimilarityMatrix,
        cfg: GridConfig,
        rng: ChaCha8Rng,
        seed: u64,
        positions: Vec<GridPos>,
        neighborhood: H,
    ) -> Self {
        assert_eq!(positions.len(), d.len(), "one position per data row");
        assert!(positions.len() <= cfg.cells(), "more bots than cells");
        let torus = Torus::new(&cfg);
        let mut occupancy = vec![None; cfg.cells()];
        for (j, p) in positions.iter().enumerate() {
            let slot = &mut occupancy[p.index(cfg.columns)];
            assert!(slot.is_none(), "two bots share cell {p:?}");
            *slot = Some(j as u32);
        }
        let mut state = Self {
            d,
            torus,
            neighborhood,
            positions,
            occupancy,
            radius: cfg.r_max,
            weights: Vec::new(),
            s0: 0.0,
            epoch: 0,
            happiness_history: Vec::new(),
            rng,
            seed,
            free: Vec::new(),
            candidates: Vec::new(),
            cfg,
        };
        state.set_radius(state.cfg.r_max);
        state.s0 = state.compute_s0();
        state
    }

    pub fn config(&self) -> &GridConfig {
        &self.cfg
    }

    pub fn torus(&self) -> &Torus {
        &self.torus
    }

    pub fn positions(&self) -> &[GridPos] {
        &self.positions
    }

    pub fn bots(&self) -> Vec<DataBot> {
        self.positions
            .iter()
            .enumerate()
            .map(|(id, &pos)| DataBot { id, pos, data_ref: id })
            .collect()
    }

    pub fn occupant(&self, pos: GridPos) -> Option<usize> {
        self.occupancy[pos.index(self.cfg.columns)].map(|j| j as usize)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn s0(&self) -> f64 {
        self.s0
    }

    pub fn epoch(&self) -> usize {
        self.epoch
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn happiness_history(&self) -> &[f64] {
        &self.happiness_history
    }

    pub fn dissimilarity(&self) -> &DissimilarityMatrix {
        self.d
    }

    /// Direct access to the engine RNG, e.g. to replay draws in tests.
    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn set_radius(&mut self, radius: usize) {
        let (l, c) = (self.cfg.lines, self.cfg.columns);
        self.radius = radius;
        self.weights.clear();
        self.weights.reserve(2 * l * c);
        for parity in 0..2 {
            for dr in 0..l {
                for dc in 0..c {
                    let from = GridPos::new(parity, 0);
                    let to = GridPos::new((parity + dr) % l, dc);
                    let sq = self.torus.sq_distance(from, to);
                    self.weights.push(self.neighborhood.weight(sq, radius as f64));
                }
            }
        }
    }

    /// Weighted mean input distance from bot `j`, placed at `at`, to every
    /// other bot inside the neighbourhood support; `None` if nobody is inside.
    pub fn neighborhood_mean(&self, j: usize, at: GridPos) -> Option<f64> {
        let (l, c) = (self.cfg.lines, self.cfg.columns);
        let base = (at.row & 1) * l;
        let drow = self.d.row(j);
        let mut sw = 0.0;
        let mut swd = 0.0;
        for (k, p) in self.positions.iter().enumerate() {
            if k == j {
                continue;
            }
            let dr = if p.row >= at.row { p.row - at.row } else { p.row + l - at.row };
            let dc = if p.col >= at.col { p.col - at.col } else { p.col + c - at.col };
            let h = self.weights[(base + dr) * c + dc];
            if h > 0.0 {
                sw += h;
                swd += h * drow[k];
            }
        }
        (sw > 0.0).then(|| swd / sw)
    }

    /// Scent of bot `j` at its current position for the current radius.
    pub fn scent(&self, j: usize) -> f64 {
        self.scent_at(j, self.positions[j])
    }

    /// Scent of bot `j` if it were relocated to `at`.
    pub fn scent_at(&self, j: usize, at: GridPos) -> f64 {
        self.s0 - self.neighborhood_mean(j, at).unwrap_or(0.0)
    }

    /// Sum of all scents (global happiness).
    pub fn happiness(&self) -> f64 {
        (0..self.positions.len()).map(|j| self.scent(j)).sum()
    }

    /// `Σ_j |λ(b_j, Rmax, 0)|` on the current configuration, at the maximum radius.
    pub fn compute_s0(&mut self) -> f64 {
        let keep = self.radius;
        self.set_radius(self.cfg.r_max);
        let s0 = (0..self.positions.len())
            .map(|j| self.neighborhood_mean(j, self.positions[j]).unwrap_or(0.0).abs())
            .sum();
        self.set_radius(keep);
        s0
    }

    /// Number of bots allowed to search at the current radius.
    pub fn sample_size(&self) -> usize {
        let share = chance(self.radius, self.cfg.r_min, self.cfg.r_max);
        ((share * self.positions.len() as f64).round() as usize).clamp(1, self.positions.len())
    }

    /// Draws the subset of bots that may search this iteration, in processing order.
    pub fn sample_bots(&mut self) -> Vec<usize> {
        let m = self.sample_size();
        index::sample(&mut self.rng, self.positions.len(), m).into_vec()
    }

    /// Lets each sampled bot (in order) try `alpha` free positions at random
    /// jump lengths in `1..=r_max` and move to the best one if it strictly
    /// beats staying. Returns how many bots moved.
    pub fn propose_and_move(&mut self, sampled: &[usize]) -> usize {
        let alpha = self.cfg.alpha;
        let r_max = self.cfg.r_max;
        let mut moved = 0;
        let mut lengths = vec![0usize; alpha];
        for &j in sampled {
            for len in lengths.iter_mut() {
                *len = self.rng.random_range(1..=r_max);
            }
            let here = self.positions[j];
            let mut candidates = std::mem::take(&mut self.candidates);
            let mut free = std::mem::take(&mut self.free);
            candidates.clear();
            for &len in &lengths {
                free.clear();
                free.extend(
                    self.torus
                        .ring(here, len)
                        .filter(|p| self.occupancy[p.index(self.cfg.columns)].is_none() && !candidates.contains(p)),
                );
                if !free.is_empty() {
                    let pick = self.rng.random_range(0..free.len());
                    candidates.push(free[pick]);
                }
            }
            let mut best_mean = self.neighborhood_mean(j, here).unwrap_or(0.0);
            let mut best = None;
            for &cand in &candidates {
                let m = self.neighborhood_mean(j, cand).unwrap_or(0.0);
                if m < best_mean {
                    best_mean = m;
                    best = Some(cand);
                }
            }
            if let Some(target) = best {
                self.occupancy[here.index(self.cfg.columns)] = None;
                self.occupancy[target.index(self.cfg.columns)] = Some(j as u32);
                self.positions[j] = target;
                moved += 1;
            }
            self.candidates = candidates;
            self.free = free;
        }
        moved
    }

    /// One iteration: sample, move, and record the new global happiness.
    pub fn iterate(&mut self) -> f64 {
        let sampled = self.sample_bots();
        self.propose_and_move(&sampled);
        let s = self.happiness();
        self.happiness_history.push(s);
        s
    }

    /// Plays one game at the current radius until happiness plateaus.
    pub fn run_epoch(&mut self, params: &PswarmParams, mut on_iteration: impl FnMut(&Self)) -> EpochLog {
        self.happiness_history.clear();
        let start = self.happiness();
        let tol = params.tol_rel * self.s0;
        let max_iter = params.max_iter_per_point * self.positions.len();
        let outcome = run_until_plateau(start, tol, params.patience, max_iter, || {
            let s = self.iterate();
            on_iteration(self);
            s
        });
        if outcome.exit == EpochExit::Safeguard {
            log::warn!(
                "epoch at radius {} hit the {max_iter}-iteration safeguard before equilibrium",
                self.radius
            );
        }
        self.epoch += 1;
        EpochLog {
            radius: self.radius,
            iterations: outcome.iterations,
            final_happiness: self.happiness_history.last().copied().unwrap_or(start),
            exit: outcome.exit,
        }
    }

    /// Full annealing from `r_max` down to `r_min`.
    pub fn anneal(&mut self, params: &PswarmParams, mut on_iteration: impl FnMut(&Self)) -> Vec<EpochLog> {
        let mut logs = Vec::new();
        for radius in super::annealing::radius_schedule(self.cfg.r_min, self.cfg.r_max) {
            self.set_radius(radius);
            logs.push(self.run_epoch(params, &mut on_iteration));
        }
        logs
    }

    /// Checks that occupancy and positions describe the same bijection.
    pub fn occupancy_consistent(&self) -> bool {
        let mut seen = 0;
        for (cell, slot) in self.occupancy.iter().enumerate() {
            if let Some(j) = slot {
                seen += 1;
                if self.positions[*j as usize].index(self.cfg.columns) != cell {
                    return false;
                }
            }
        }
        seen == self.positions.len()
    }
}
