//! Toroidal hexagonal grid geometry.
//!
//! Cells are addressed by `(row, col)`. The hex embedding puts cell centres
//! at `x = col + 0.5 * (row % 2)`, `y = row * sqrt(3)/2`; both axes wrap, so
//! the grid tiles the plane with periods `C` and `L * sqrt(3)/2`. An even
//! number of lines keeps the row offset pattern consistent across the seam.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::data::DistanceStats;
use crate::error::{DbsError, Result};

pub const ROW_PITCH: f64 = 0.866_025_403_784_438_6; // sqrt(3)/2
pub const DEFAULT_ALPHA: usize = 4;
pub const DEFAULT_BETA: f64 = 0.8;
/// Share of the grid every bot must be able to smell at the smallest radius.
pub const MIN_VISIBLE_SHARE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub lines: usize,
    pub columns: usize,
    pub alpha: usize,
    pub beta: f64,
    pub r_max: usize,
    pub r_min: usize,
    /// p99 / p01 of the input distances.
    pub spectrum_ratio: f64,
}

impl GridConfig {
    pub fn cells(&self) -> usize {
        self.lines * self.columns
    }

    pub fn width(&self) -> f64 {
        self.columns as f64
    }

    pub fn height(&self) -> f64 {
        self.lines as f64 * ROW_PITCH
    }

    /// Builds a config for explicit dimensions, deriving both radii.
    pub fn with_dims(lines: usize, columns: usize, alpha: usize, beta: f64) -> Result<Self> {
        if lines < 4 || columns < 4 || lines > columns {
            return Err(DbsError::InvalidParameter(format!(
                "grid {lines}×{columns} must satisfy 4 <= L <= C"
            )));
        }
        let r_max = lines / 2;
        let r_min = rmin_for(lines, columns, r_max);
        Ok(Self {
            lines,
            columns,
            alpha,
            beta,
            r_max,
            r_min,
            spectrum_ratio: f64::NAN,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridPos {
    pub row: usize,
    pub col: usize,
}

impl GridPos {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Cartesian centre of the cell in the hex embedding.
    pub fn to_cartesian(self) -> (f64, f64) {
        let x = self.col as f64 + if self.row % 2 == 1 { 0.5 } else { 0.0 };
        (x, self.row as f64 * ROW_PITCH)
    }

    pub fn index(self, columns: usize) -> usize {
        self.row * columns + self.col
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarVec {
    pub r: f64,
    /// Degrees in [0, 360).
    pub phi: f64,
}

pub fn polar_from_cartesian(x: f64, y: f64) -> PolarVec {
    let r = (x * x + y * y).sqrt();
    if r == 0.0 {
        return PolarVec { r, phi: 0.0 };
    }
    let mut phi = y.atan2(x).to_degrees();
    if phi < 0.0 {
        phi += 360.0;
    }
    if phi >= 360.0 {
        phi -= 360.0;
    }
    PolarVec { r, phi }
}

#[inline]
fn wrap(delta: f64, period: f64) -> f64 {
    delta - period * (delta / period).round()
}

/// Squared toroidal distance between two points of the embedding plane.
#[inline]
pub fn torus_sq_dist(a: (f64, f64), b: (f64, f64), width: f64, height: f64) -> f64 {
    let dx = wrap(b.0 - a.0, width);
    let dy = wrap(b.1 - a.1, height);
    dx * dx + dy * dy
}

/// Shortest distance between two cells over all wrap images.
pub fn grid_distance(a: GridPos, b: GridPos, cfg: &GridConfig) -> f64 {
    torus_sq_dist(a.to_cartesian(), b.to_cartesian(), cfg.width(), cfg.height()).sqrt()
}

/// Cone neighbourhood weight `1 - r²/(π Re²)`, zero outside its support.
#[inline]
pub fn cone(r: f64, radius: f64) -> f64 {
    cone_sq(r * r, radius)
}

#[inline]
pub fn cone_sq(r2: f64, radius: f64) -> f64 {
    let q = r2 / (PI * radius * radius);
    if q < 1.0 {
        1.0 - q
    } else {
        0.0
    }
}

/// Chooses grid dimensions from the distance spectrum.
///
/// With `A = p99/p01`, conditions are `sqrt(C² + L²) >= A`, `L·C >= α·N` and
/// `L/C ≈ β`. When `A⁴ >= 4α²N²` the first two at equality give
/// `C² = (A² + sqrt(A⁴ - 4α²N²)) / 2`; otherwise a window around
/// `L = sqrt(α N β)` is searched for the ratio closest to β.
pub fn solve_grid_size(stats: &DistanceStats, n: usize, alpha: usize, beta: f64) -> Result<GridConfig> {
    if n < 3 {
        return Err(DbsError::TooFewPoints(n));
    }
    if alpha == 0 {
        return Err(DbsError::InvalidParameter("alpha must be at least 1".into()));
    }
    if !(beta > 0.5 && beta <= 1.0) {
        return Err(DbsError::InvalidParameter(format!("beta = {beta} outside (0.5, 1]")));
    }
    let p01 = if stats.p01 > 0.0 {
        stats.p01
    } else {
        stats.min_positive.ok_or(DbsError::AllZeroDistances)?
    };
    if stats.p99 <= 0.0 {
        return Err(DbsError::AllZeroDistances);
    }
    let a = (stats.p99 / p01).max(1.0);
    let need = (alpha * n) as f64;
    let a2 = a * a;
    let disc = a2 * a2 - 4.0 * need * need;

    let (lines, columns) = if disc >= 0.0 {
        let c = ((a2 + disc.sqrt()) / 2.0).sqrt().ceil() as usize;
        let l = (need / c as f64).ceil() as usize;
        normalize_root(l, c.max(4))
    } else {
        approximate(a, need, beta)
    };
    let mut cfg = GridConfig::with_dims(lines, columns, alpha, beta)?;
    cfg.spectrum_ratio = a;
    debug_assert!(satisfies_conditions(&cfg, n));
    Ok(cfg)
}

/// Makes a closed-form solution admissible: even L >= 4, 0.5 < L/C <= 1.
fn normalize_root(l: usize, c: usize) -> (usize, usize) {
    let mut l = l.max(4);
    if 2 * l <= c {
        l = c / 2 + 1;
    }
    if l % 2 == 1 {
        l += 1;
    }
    (l, c.max(l))
}

fn approximate(a: f64, need: f64, beta: f64) -> (usize, usize) {
    let l0 = (need * beta).sqrt().ceil().max(4.0);
    let c0 = (l0 / beta).ceil();
    let mut spread = 0.25;
    loop {
        let l_range = ((l0 * (1.0 - spread)).floor() as usize).max(4)..=(l0 * (1.0 + spread)).ceil() as usize;
        let c_lo = ((c0 * (1.0 - spread)).floor() as usize).max(4);
        let c_hi = (c0 * (1.0 + spread)).ceil() as usize;
        let mut best: Option<(f64, usize, usize, usize)> = None;
        for l in l_range.filter(|l| l % 2 == 0) {
            for c in c_lo.max(l)..=c_hi {
                let ratio = l as f64 / c as f64;
                if ratio <= 0.5 || ((l * c) as f64) < need {
                    continue;
                }
                if ((c * c + l * l) as f64).sqrt() < a {
                    continue;
                }
                let key = ((ratio - beta).abs(), l * c, l, c);
                if best.is_none_or(|b| (key.0, key.1) < (b.0, b.1)) {
                    best = Some(key);
                }
            }
        }
        if let Some((_, _, l, c)) = best {
            return (l, c);
        }
        spread *= 2.0;
    }
}

/// Conditions on a sized grid: resolution, capacity and aspect.
pub fn satisfies_conditions(cfg: &GridConfig, n: usize) -> bool {
    let (l, c) = (cfg.lines as f64, cfg.columns as f64);
    (l * l + c * c).sqrt() >= cfg.spectrum_ratio
        && cfg.lines * cfg.columns >= cfg.alpha * n
        && l / c > 0.5
        && l / c <= 1.0
}

/// Smallest radius whose disc covers at least 5% of the grid cells, capped
/// at `r_max - 1`.
pub fn rmin_from_grid(cfg: &GridConfig) -> usize {
    rmin_for(cfg.lines, cfg.columns, cfg.r_max)
}

fn rmin_for(lines: usize, columns: usize, r_max: usize) -> usize {
    let cap = r_max.saturating_sub(1).max(1);
    let target = MIN_VISIBLE_SHARE * (lines * columns) as f64;
    let origin = GridPos::new(0, 0).to_cartesian();
    let (w, h) = (columns as f64, lines as f64 * ROW_PITCH);
    let mut dists: Vec<f64> = (0..lines)
        .flat_map(|r| (0..columns).map(move |c| GridPos::new(r, c)))
        .map(|p| torus_sq_dist(origin, p.to_cartesian(), w, h).sqrt())
        .collect();
    dists.sort_by(f64::total_cmp);
    for radius in 1..=cap {
        let covered = dists.partition_point(|&d| d <= radius as f64 + 1e-9);
        if covered as f64 >= target {
            return radius;
        }
    }
    cap
}

/// Cells whose distance from `center` is within half a cell of `length`.
pub fn ring_positions(center: GridPos, length: f64, cfg: &GridConfig) -> Vec<GridPos> {
    let mut out = Vec::new();
    for row in 0..cfg.lines {
        for col in 0..cfg.columns {
            let p = GridPos::new(row, col);
            if p != center && (grid_distance(center, p, cfg) - length).abs() <= 0.5 {
                out.push(p);
            }
        }
    }
    out
}

/// Precomputed geometry for fast repeated queries on one grid.
///
/// Distances depend only on the row parity of the source cell and the
/// wrapped offset to the target, so every table is indexed by
/// `(parity, d_row, d_col)`.
#[derive(Debug, Clone)]
pub struct Torus {
    lines: usize,
    columns: usize,
    sq_dist: Vec<f64>,
    /// `rings[length - 1][parity]` lists `(d_row, d_col)` offsets.
    rings: Vec<[Vec<(usize, usize)>; 2]>,
}

impl Torus {
    pub fn new(cfg: &GridConfig) -> Self {
        let (l, c) = (cfg.lines, cfg.columns);
        let mut sq_dist = vec![0.0; 2 * l * c];
        for parity in 0..2 {
            let origin = GridPos::new(parity, 0);
            for dr in 0..l {
                for dc in 0..c {
                    let target = GridPos::new((parity + dr) % l, dc);
                    sq_dist[(parity * l + dr) * c + dc] =
                        torus_sq_dist(origin.to_cartesian(), target.to_cartesian(), cfg.width(), cfg.height());
                }
            }
        }
        let mut rings = Vec::with_capacity(cfg.r_max);
        for length in 1..=cfg.r_max {
            let mut per_parity: [Vec<(usize, usize)>; 2] = [Vec::new(), Vec::new()];
            for (parity, offsets) in per_parity.iter_mut().enumerate() {
                for dr in 0..l {
                    for dc in 0..c {
                        let d = sq_dist[(parity * l + dr) * c + dc].sqrt();
                        if (dr, dc) != (0, 0) && (d - length as f64).abs() <= 0.5 {
                            offsets.push((dr, dc));
                        }
                    }
                }
            }
            rings.push(per_parity);
        }
        Self {
            lines: l,
            columns: c,
            sq_dist,
            rings,
        }
    }

    pub fn lines(&self) -> usize {
        self.lines
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    #[inline]
    pub fn sq_distance(&self, a: GridPos, b: GridPos) -> f64 {
        let dr = (b.row + self.lines - a.row) % self.lines;
        let dc = (b.col + self.columns - a.col) % self.columns;
        self.sq_dist[((a.row & 1) * self.lines + dr) * self.columns + dc]
    }

    pub fn distance(&self, a: GridPos, b: GridPos) -> f64 {
        self.sq_distance(a, b).sqrt()
    }

    /// Offsets of the ring at integer `length` for a source cell of row parity `parity`.
    pub fn ring_offsets(&self, length: usize, parity: usize) -> &[(usize, usize)] {
        &self.rings[length - 1][parity]
    }

    pub fn offset(&self, from: GridPos, (dr, dc): (usize, usize)) -> GridPos {
        GridPos::new((from.row + dr) % self.lines, (from.col + dc) % self.columns)
    }

    /// Ring cells around `center`, ordered by wrapped offset `(d_row, d_col)`.
    pub fn ring(&self, center: GridPos, length: usize) -> impl Iterator<Item = GridPos> + '_ {
        self.ring_offsets(length, center.row & 1)
            .iter()
            .map(move |&o| self.offset(center, o))
    }
}
