//! Geodesic distances over the neighbour graph and hierarchical clustering
//! in the two structure types: connected (single linkage) and compact
//! (Ward).

mod dendrogram;
mod geodesic;
mod linkage;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use dendrogram::{canonical_labels, Dendrogram, Merge};
pub use geodesic::{geodesic_distances, GeodesicMatrix};
pub use linkage::{minimum_spanning_tree, single_linkage, ward_linkage};

use crate::error::{DbsError, Result};

pub const DEFAULT_GAP_MERGES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterMode {
    Connected,
    Compact,
}

impl ClusterMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ClusterMode::Connected => "connected",
            ClusterMode::Compact => "compact",
        }
    }
}

impl fmt::Display for ClusterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClusterMode {
    type Err = DbsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "connected" => Ok(ClusterMode::Connected),
            "compact" => Ok(ClusterMode::Compact),
            other => Err(DbsError::InvalidParameter(format!(
                "mode must be connected or compact, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterResult {
    /// One label per point in `1..=k` (plus an outlier class once points are
    /// marked).
    pub labels: Vec<usize>,
    pub k: usize,
    pub mode: ClusterMode,
    /// Sorted point ids.
    pub outliers: Vec<usize>,
    /// Label given to manually marked points, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outlier_label: Option<usize>,
    pub dendrogram: Dendrogram,
}

impl ClusterResult {
    pub fn n_clusters(&self) -> usize {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    /// Moves `marked` points into a dedicated class after the remaining
    /// labels, renumbering the rest so labels stay contiguous. An empty mark
    /// set returns the result unchanged.
    pub fn with_marked(&self, marked: &BTreeSet<usize>) -> Result<ClusterResult> {
        let n = self.labels.len();
        if let Some(&bad) = marked.iter().find(|&&i| i >= n) {
            return Err(DbsError::InvalidParameter(format!("point id {bad} out of range (n = {n})")));
        }
        if marked.is_empty() {
            return Ok(self.clone());
        }
        let kept: Vec<Option<usize>> = (0..n)
            .map(|i| if marked.contains(&i) { None } else { Some(self.labels[i]) })
            .collect();
        let relabeled = canonical_labels(&kept);
        let outlier_label = relabeled[*marked.iter().next().unwrap()];
        // canonical_labels ranks the marked class by its size; move it last
        let top = relabeled.iter().copied().max().unwrap();
        let labels = relabeled
            .into_iter()
            .map(|l| match l.cmp(&outlier_label) {
                std::cmp::Ordering::Equal => top,
                std::cmp::Ordering::Greater => l - 1,
                std::cmp::Ordering::Less => l,
            })
            .collect();
        let outliers: BTreeSet<usize> = self.outliers.iter().copied().chain(marked.iter().copied()).collect();
        Ok(ClusterResult {
            labels,
            k: self.k,
            mode: self.mode,
            outliers: outliers.into_iter().collect(),
            outlier_label: Some(top),
            dendrogram: self.dendrogram.clone(),
        })
    }
}

pub fn linkage(g: &GeodesicMatrix, mode: ClusterMode) -> Result<Dendrogram> {
    match mode {
        ClusterMode::Connected => single_linkage(g),
        ClusterMode::Compact => ward_linkage(g),
    }
}

/// Builds the dendrogram for `mode` and cuts it into `k` clusters.
pub fn hierarchical_cluster(g: &GeodesicMatrix, k: usize, mode: ClusterMode) -> Result<ClusterResult> {
    if k == 0 || k > g.len() {
        return Err(DbsError::InvalidK { k, n: g.len() });
    }
    let dendrogram = linkage(g, mode)?;
    cluster_from_dendrogram(dendrogram, k, mode)
}

pub fn cluster_from_dendrogram(dendrogram: Dendrogram, k: usize, mode: ClusterMode) -> Result<ClusterResult> {
    let labels = dendrogram.cut(k)?;
    Ok(ClusterResult {
        labels,
        k,
        mode,
        outliers: Vec::new(),
        outlier_label: None,
        dendrogram,
    })
}

/// Largest relative jump among the top `m` merge heights,
/// `max (h[i+1] - h[i]) / h[m]`. Near 1 means a clear cluster structure,
/// near 0 means none.
pub fn tendency_gap(dendrogram: &Dendrogram, m: usize) -> Result<f64> {
    let mut h = dendrogram.heights();
    if m < 2 || dendrogram.n_leaves() <= m {
        return Err(DbsError::InvalidParameter(format!(
            "need 2 <= m < n, got m = {m}, n = {}",
            dendrogram.n_leaves()
        )));
    }
    h.sort_by(f64::total_cmp);
    Ok(heights_gap(&h[h.len() - m..]))
}

fn heights_gap(sorted: &[f64]) -> f64 {
    let top = *sorted.last().unwrap();
    if top <= 0.0 {
        return 0.0;
    }
    sorted.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max) / top
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DissimilarityMatrix;

    fn g3() -> GeodesicMatrix {
        GeodesicMatrix::from_dissimilarity(
            &DissimilarityMatrix::from_rows(vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 2.0], vec![3.0, 2.0, 0.0]]).unwrap(),
        )
    }

    #[test]
    fn gap_arithmetic() {
        assert_eq!(heights_gap(&[1.0, 1.0, 1.0, 10.0]), 0.9);
        assert_eq!(heights_gap(&[2.0; 5]), 0.0);
        assert_eq!(heights_gap(&[0.0; 5]), 0.0);
        let d = Dendrogram::from_leaf_pairs(5, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 10.0)]).unwrap();
        assert_eq!(tendency_gap(&d, 4).unwrap(), 0.9);
        assert!(tendency_gap(&d, 5).is_err());
    }

    #[test]
    fn invalid_k() {
        assert!(matches!(hierarchical_cluster(&g3(), 0, ClusterMode::Connected), Err(DbsError::InvalidK { .. })));
        assert!(matches!(hierarchical_cluster(&g3(), 4, ClusterMode::Compact), Err(DbsError::InvalidK { .. })));
    }

    #[test]
    fn mode_parsing_round_trip() {
        for m in [ClusterMode::Connected, ClusterMode::Compact] {
            assert_eq!(m.as_str().parse::<ClusterMode>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
        assert!("ward".parse::<ClusterMode>().is_err());
    }

    #[test]
    fn mark_and_unmark() {
        let base = hierarchical_cluster(&g3(), 2, ClusterMode::Connected).unwrap();
        assert_eq!(base.labels, vec![1, 1, 2]);
        let marked = base.with_marked(&BTreeSet::from([1])).unwrap();
        assert_eq!(marked.labels, vec![1, 3, 2]);
        assert_eq!(marked.outlier_label, Some(3));
        assert_eq!(marked.outliers, vec![1]);
        assert_eq!(base.with_marked(&BTreeSet::new()).unwrap(), base);
        // whole cluster marked: remaining labels stay contiguous
        let all = base.with_marked(&BTreeSet::from([2])).unwrap();
        assert_eq!(all.labels, vec![1, 1, 2]);
        assert_eq!(all.outlier_label, Some(2));
        assert!(base.with_marked(&BTreeSet::from([7])).is_err());
    }

    #[test]
    fn result_json_shape() {
        let r = hierarchical_cluster(&g3(), 2, ClusterMode::Compact).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["mode"], "compact");
        assert_eq!(v["k"], 2);
        assert!(v["dendrogram"]["merges"].is_array());
        assert!(v.get("outlier_label").is_none());
        let back: ClusterResult = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}
