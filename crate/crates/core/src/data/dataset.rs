use serde::{Deserialize, Serialize};

use crate::error::{DbsError, Result};

/// `n` points with `d` features each, stored row-major, with optional class labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    n: usize,
    d: usize,
    values: Vec<f64>,
    labels: Option<Vec<i64>>,
}

impl Dataset {
    /// Builds a dataset from rows, checking shape, finiteness and label count.
    pub fn new(name: impl Into<String>, rows: Vec<Vec<f64>>, labels: Option<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if n < 3 {
            return Err(DbsError::TooFewPoints(n));
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(DbsError::InvalidDataset("points need at least one feature".into()));
        }
        let mut values = Vec::with_capacity(n * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(DbsError::InvalidDataset(format!(
                    "row {i} has {} features, expected {d}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(DbsError::NonFinite { row: i, col: j });
                }
            }
            values.extend_from_slice(row);
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(DbsError::LengthMismatch(l.len(), n));
            }
        }
        Ok(Self {
            name: name.into(),
            n,
            d,
            values,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.d)
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}
