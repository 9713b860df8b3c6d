use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::data::DissimilarityMatrix;
use crate::error::{DbsError, Result};
use crate::topomap::NeighborGraph;

/// Dense symmetric distance matrix fed to the linkage routines. Built either
/// from shortest paths over a neighbour graph or directly from `D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicMatrix {
    n: usize,
    values: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl GeodesicMatrix {
    /// Raw dissimilarities used as-is (for baselines on `D`).
    pub fn from_dissimilarity(d: &DissimilarityMatrix) -> Self {
        Self {
            n: d.len(),
            values: d.as_flat().to_vec(),
        }
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

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }
}

/// Single-source Dijkstra from every vertex.
pub fn geodesic_distances(graph: &NeighborGraph) -> Result<GeodesicMatrix> {
    let n = graph.len();
    if n == 0 {
        return Err(DbsError::Empty);
    }
    let comps = graph.components();
    if comps.len() > 1 {
        return Err(DbsError::Disconnected {
            components: comps.len(),
            examples: comps.iter().take(8).map(|c| c[0]).collect(),
        });
    }
    let mut values = vec![f64::INFINITY; n * n];
    let mut heap = BinaryHeap::new();
    for s in 0..n {
        let row = &mut values[s * n..(s + 1) * n];
        row[s] = 0.0;
        heap.push(Reverse((Key(0.0), s)));
        while let Some(Reverse((Key(dist), v))) = heap.pop() {
            if dist > row[v] {
                continue;
            }
            for &(u, w) in graph.neighbors(v) {
                let nd = dist + w;
                if nd < row[u] {
                    row[u] = nd;
                    heap.push(Reverse((Key(nd), u)));
                }
            }
        }
    }
    // Paths found from either end can differ in the last ulp.
    for i in 0..n {
        for j in i + 1..n {
            let m = values[i * n + j].min(values[j * n + i]);
            values[i * n + j] = m;
            values[j * n + i] = m;
        }
    }
    Ok(GeodesicMatrix { n, values })
}
