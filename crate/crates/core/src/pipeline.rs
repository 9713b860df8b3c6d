//! The full databionic swarm pipeline with its expensive stages cached.

use std::sync::OnceLock;

use crate::clustering::{
    cluster_from_dendrogram, geodesic_distances, linkage, ClusterMode, ClusterResult, Dendrogram, GeodesicMatrix,
};
use crate::data::DissimilarityMatrix;
use crate::error::{DbsError, Result};
use crate::pswarm::{pswarm_project_with, Projection, PswarmParams};
use crate::topomap::{delaunay_torus, detect_volcanoes, render_heightmap, u_heights, NeighborGraph, TopoMap};

/// Projection, neighbour graph, geodesics and topographic map of one input.
/// Everything is immutable once built; dendrograms are computed lazily per
/// mode and kept, so re-cutting at a different `k` is cheap.
#[derive(Debug)]
pub struct DbsModel {
    dissimilarity: DissimilarityMatrix,
    projection: Projection,
    graph: NeighborGraph,
    geodesic: GeodesicMatrix,
    topomap: TopoMap,
    connected: OnceLock<Dendrogram>,
    compact: OnceLock<Dendrogram>,
}

#[derive(Debug, Clone)]
pub struct DbsOutput {
    pub projection: Projection,
    pub topomap: TopoMap,
    pub clusters: ClusterResult,
}

impl DbsModel {
    pub fn build(d: DissimilarityMatrix, params: &PswarmParams, seed: u64) -> Result<Self> {
        let projection = pswarm_project_with(&d, params, seed)?;
        Self::from_projection(d, projection)
    }

    /// Rebuilds the downstream stages for a stored projection.
    pub fn from_projection(d: DissimilarityMatrix, projection: Projection) -> Result<Self> {
        if d.len() != projection.len() {
            return Err(DbsError::LengthMismatch(d.len(), projection.len()));
        }
        let graph = delaunay_torus(&projection, &d)?;
        let geodesic = geodesic_distances(&graph)?;
        let heights = u_heights(&graph)?;
        let topomap = render_heightmap(&projection, &heights);
        Ok(Self {
            dissimilarity: d,
            projection,
            graph,
            geodesic,
            topomap,
            connected: OnceLock::new(),
            compact: OnceLock::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.projection.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projection.is_empty()
    }

    pub fn dissimilarity(&self) -> &DissimilarityMatrix {
        &self.dissimilarity
    }

    pub fn projection(&self) -> &Projection {
        &self.projection
    }

    pub fn graph(&self) -> &NeighborGraph {
        &self.graph
    }

    pub fn geodesic(&self) -> &GeodesicMatrix {
        &self.geodesic
    }

    pub fn topomap(&self) -> &TopoMap {
        &self.topomap
    }

    pub fn dendrogram(&self, mode: ClusterMode) -> Result<&Dendrogram> {
        let cell = match mode {
            ClusterMode::Connected => &self.connected,
            ClusterMode::Compact => &self.compact,
        };
        if let Some(d) = cell.get() {
            return Ok(d);
        }
        let d = linkage(&self.geodesic, mode)?;
        Ok(cell.get_or_init(|| d))
    }

    /// Cuts the `mode` dendrogram at `k` and flags volcano outliers.
    pub fn cluster(&self, k: usize, mode: ClusterMode) -> Result<ClusterResult> {
        if k == 0 || k > self.len() {
            return Err(DbsError::InvalidK { k, n: self.len() });
        }
        let mut result = cluster_from_dendrogram(self.dendrogram(mode)?.clone(), k, mode)?;
        result.outliers = detect_volcanoes(&self.topomap, &result.labels);
        Ok(result)
    }
}

/// Projection, map and clustering of `d` in one call.
pub fn dbs_cluster(d: &DissimilarityMatrix, k: usize, mode: ClusterMode, seed: u64) -> Result<DbsOutput> {
    if k == 0 || k > d.len() {
        return Err(DbsError::InvalidK { k, n: d.len() });
    }
    let model = DbsModel::build(d.clone(), &PswarmParams::default(), seed)?;
    let clusters = model.cluster(k, mode)?;
    Ok(DbsOutput {
        projection: model.projection,
        topomap: model.topomap,
        clusters,
    })
}
