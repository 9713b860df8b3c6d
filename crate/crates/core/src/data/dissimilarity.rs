use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{DbsError, Result};

/// Summary of the upper-triangle distance spectrum used for grid sizing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceStats {
    pub p01: f64,
    pub p99: f64,
    /// Smallest strictly positive entry, `None` when every distance is zero.
    pub min_positive: Option<f64>,
}

/// Symmetric, zero-diagonal, non-negative n×n matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    values: Vec<f64>,
    stats: DistanceStats,
}

/// Tolerance used when checking symmetry of user-supplied matrices.
pub const SYMMETRY_TOL: f64 = 1e-9;

impl DissimilarityMatrix {
    /// Validates and wraps a row-major matrix.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(DbsError::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Self::from_flat(n, values)
    }

    pub fn from_flat(n: usize, mut values: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(DbsError::InvalidMatrix(format!("need at least 2 objects, got {n}")));
        }
        if values.len() != n * n {
            return Err(DbsError::LengthMismatch(values.len(), n * n));
        }
        for i in 0..n {
            for j in 0..n {
                let v = values[i * n + j];
                if !v.is_finite() {
                    return Err(DbsError::NonFinite { row: i, col: j });
                }
                if v < 0.0 {
                    return Err(DbsError::InvalidMatrix(format!("negative entry D[{i}][{j}] = {v}")));
                }
            }
            if values[i * n + i] != 0.0 {
                return Err(DbsError::InvalidMatrix(format!(
                    "non-zero diagonal D[{i}][{i}] = {}",
                    values[i * n + i]
                )));
            }
            for j in (i + 1)..n {
                let (a, b) = (values[i * n + j], values[j * n + i]);
                if (a - b).abs() > SYMMETRY_TOL {
                    return Err(DbsError::Asymmetric { i, j, a, b });
                }
            }
        }
        // Exact symmetry downstream.
        for i in 0..n {
            for j in (i + 1)..n {
                values[j * n + i] = values[i * n + j];
            }
        }
        let stats = upper_triangle_stats(n, &values);
        Ok(Self { n, values, stats })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn stats(&self) -> DistanceStats {
        self.stats
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }

    /// Returns a copy with every entry multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(DbsError::InvalidParameter(format!("scale factor {factor}")));
        }
        Self::from_flat(self.n, self.values.iter().map(|v| v * factor).collect())
    }

    /// Upper-triangle entries, row by row, excluding the diagonal.
    pub fn upper_triangle(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for i in 0..self.n {
            out.extend_from_slice(&self.values[i * self.n + i + 1..(i + 1) * self.n]);
        }
        out
    }
}

fn upper_triangle_stats(n: usize, values: &[f64]) -> DistanceStats {
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        upper.extend_from_slice(&values[i * n + i + 1..(i + 1) * n]);
    }
    upper.sort_by(f64::total_cmp);
    let min_positive = upper.iter().copied().find(|&v| v > 0.0);
    DistanceStats {
        p01: percentile_sorted(&upper, 0.01),
        p99: percentile_sorted(&upper, 0.99),
        min_positive,
    }
}

fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Linear-interpolation quantile (`q` in [0, 1]) of unsorted values.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    percentile_sorted(&sorted, q)
}

/// Pairwise Euclidean distances between the rows of a dataset.
pub fn euclidean_dissimilarity(ds: &Dataset) -> DissimilarityMatrix {
    let rows: Vec<&[f64]> = ds.rows().collect();
    pairwise_euclidean(&rows).expect("a validated dataset yields a valid matrix")
}

/// Pairwise Euclidean distances for arbitrary rows (at least two).
pub fn pairwise_euclidean(rows: &[&[f64]]) -> Result<DissimilarityMatrix> {
    let n = rows.len();
    for (i, r) in rows.iter().enumerate() {
        if let Some(j) = r.iter().position(|v| !v.is_finite()) {
            return Err(DbsError::NonFinite { row: i, col: j });
        }
    }
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = rows[i]
                .iter()
                .zip(rows[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    DissimilarityMatrix::from_flat(n, values)
}
