use super::{NeighborGraph, TopoMap};
use crate::data::percentile;
use crate::error::{DbsError, Result};

/// Mean input distance from each vertex to its graph neighbours.
pub fn u_heights(graph: &NeighborGraph) -> Result<Vec<f64>> {
    (0..graph.len())
        .map(|v| {
            let nb = graph.neighbors(v);
            if nb.is_empty() {
                return Err(DbsError::IsolatedVertex(v));
            }
            Ok(nb.iter().map(|&(_, w)| w).sum::<f64>() / nb.len() as f64)
        })
        .collect()
}

/// Points that sit unusually high (above `Q3 + 1.5·IQR` of all point
/// heights) and belong to a tiny cluster (fewer than `max(3, 1% of N)`
/// members). `labels` are cluster ids, one per point.
pub fn detect_volcanoes(topo: &TopoMap, labels: &[usize]) -> Vec<usize> {
    let heights = &topo.point_heights;
    let n = heights.len();
    if n == 0 || labels.len() != n {
        return Vec::new();
    }
    let q1 = percentile(heights, 0.25);
    let q3 = percentile(heights, 0.75);
    let fence = q3 + 1.5 * (q3 - q1);
    let tiny = (0.01 * n as f64).max(3.0);
    let mut sizes = std::collections::HashMap::new();
    for &l in labels {
        *sizes.entry(l).or_insert(0usize) += 1;
    }
    (0..n)
        .filter(|&i| heights[i] > fence && (sizes[&labels[i]] as f64) < tiny)
        .collect()
}
