//! Radius schedule, jump chance and the equilibrium stopping rule.

use serde::{Deserialize, Serialize};

pub const CHANCE_AT_RMAX: f64 = 0.5;
pub const CHANCE_AT_RMIN: f64 = 0.05;

/// Share of bots allowed to search for a new position at radius `radius`:
/// linear from 0.5 at `r_max` down to 0.05 at `r_min`.
pub fn chance(radius: usize, r_min: usize, r_max: usize) -> f64 {
    if r_max <= r_min {
        return CHANCE_AT_RMIN;
    }
    let t = (radius.clamp(r_min, r_max) - r_min) as f64 / (r_max - r_min) as f64;
    CHANCE_AT_RMIN + (CHANCE_AT_RMAX - CHANCE_AT_RMIN) * t
}

/// Radii visited by the annealing loop, largest first.
pub fn radius_schedule(r_min: usize, r_max: usize) -> impl Iterator<Item = usize> {
    (r_min..=r_max).rev()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpochExit {
    /// Happiness stayed flat for `patience` consecutive iterations.
    Equilibrium,
    /// The iteration cap was hit first.
    Safeguard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpochOutcome {
    pub iterations: usize,
    pub exit: EpochExit,
}

/// Iterates `step` (which returns the global happiness after one iteration)
/// until `|S_t - S_{t-1}| <= tol` holds `patience` times in a row.
pub fn run_until_plateau(
    initial: f64,
    tol: f64,
    patience: usize,
    max_iter: usize,
    mut step: impl FnMut() -> f64,
) -> EpochOutcome {
    let mut prev = initial;
    let mut flat = 0;
    for t in 1..=max_iter {
        let s = step();
        if (s - prev).abs() <= tol {
            flat += 1;
        } else {
            flat = 0;
        }
        prev = s;
        if flat >= patience {
            return EpochOutcome {
                iterations: t,
                exit: EpochExit::Equilibrium,
            };
        }
    }
    EpochOutcome {
        iterations: max_iter,
        exit: EpochExit::Safeguard,
    }
}
