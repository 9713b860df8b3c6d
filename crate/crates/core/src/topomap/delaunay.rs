use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use spade::{DelaunayTriangulation, Point2, Triangulation};

use crate::data::DissimilarityMatrix;
use crate::error::{DbsError, Result};
use crate::grid::torus_sq_dist;
use crate::pswarm::Projection;

/// Undirected graph over projected points, edges weighted by input distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "GraphRepr", from = "GraphRepr")]
pub struct NeighborGraph {
    n: usize,
    /// Sorted `(a, b, weight)` with `a < b`.
    edges: Vec<(usize, usize, f64)>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl From<GraphRepr> for NeighborGraph {
    fn from(r: GraphRepr) -> Self {
        Self::from_weighted(r.n, r.edges)
    }
}

impl From<NeighborGraph> for GraphRepr {
    fn from(g: NeighborGraph) -> Self {
        Self { n: g.n, edges: g.edges }
    }
}

impl NeighborGraph {
    /// Builds a graph from vertex pairs, weighting each pair by `D`.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>, d: &DissimilarityMatrix) -> Self {
        Self::from_weighted(
            n,
            pairs.into_iter().map(|(a, b)| (a, b, d.get(a, b))).collect(),
        )
    }

    pub fn from_weighted(n: usize, edges: Vec<(usize, usize, f64)>) -> Self {
        let mut set: Vec<(usize, usize, f64)> = edges
            .into_iter()
            .filter(|(a, b, _)| a != b)
            .map(|(a, b, w)| if a < b { (a, b, w) } else { (b, a, w) })
            .collect();
        set.sort_by_key(|x| (x.0, x.1));
        set.dedup_by(|x, y| x.0 == y.0 && x.1 == y.1);
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b, w) in &set {
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
        }
        Self {
            n,
            edges: set,
            adjacency,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].iter().any(|&(v, _)| v == b)
    }

    /// Connected components as vertex lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &(u, _) in &self.adjacency[v] {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.components().len() == 1
    }
}

/// Edges of the planar Delaunay triangulation of `points` (index pairs, a < b).
/// Returns `None` when the points are collinear and no triangle exists.
pub fn planar_delaunay_edges(points: &[(f64, f64)]) -> Option<Vec<(usize, usize)>> {
    let mut tri: DelaunayTriangulation<Point2<f64>> = DelaunayTriangulation::new();
    let mut ids = Vec::with_capacity(points.len());
    for (i, &(x, y)) in points.iter().enumerate() {
        let h = tri.insert(Point2::new(x, y)).ok()?;
        if ids.len() <= h.index() {
            ids.resize(h.index() + 1, usize::MAX);
        }
        ids[h.index()] = i;
    }
    if tri.num_inner_faces() == 0 {
        return None;
    }
    let mut out: Vec<(usize, usize)> = tri
        .undirected_edges()
        .map(|e| {
            let [a, b] = e.vertices();
            let (a, b) = (ids[a.fix().index()], ids[b.fix().index()]);
            (a.min(b), a.max(b))
        })
        .collect();
    out.sort();
    out.dedup();
    Some(out)
}

/// Delaunay edges of points on a `width × height` torus: the 3×3 tiling is
/// triangulated and every edge touching the central copy is folded back.
pub fn delaunay_torus_coords(coords: &[(f64, f64)], width: f64, height: f64) -> Option<Vec<(usize, usize)>> {
    let n = coords.len();
    let mut tiled = Vec::with_capacity(9 * n);
    // Central tile first so its copies are indices 0..n.
    let shifts = [(0, 0), (-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];
    for (sx, sy) in shifts {
        for &(x, y) in coords {
            tiled.push((x + sx as f64 * width, y + sy as f64 * height));
        }
    }
    let edges = planar_delaunay_edges(&tiled)?;
    let set: BTreeSet<(usize, usize)> = edges
        .into_iter()
        .filter(|&(a, b)| a < n || b < n)
        .map(|(a, b)| {
            let (a, b) = (a % n, b % n);
            (a.min(b), a.max(b))
        })
        .filter(|(a, b)| a != b)
        .collect();
    Some(set.into_iter().collect())
}

/// k-nearest-neighbour pairs under toroidal distance.
pub fn knn_graph(coords: &[(f64, f64)], width: f64, height: f64, k: usize) -> Vec<(usize, usize)> {
    let n = coords.len();
    let mut set = BTreeSet::new();
    for i in 0..n {
        let mut ds: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (torus_sq_dist(coords[i], coords[j], width, height), j))
            .collect();
        ds.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in ds.iter().take(k) {
            set.insert((i.min(j), i.max(j)));
        }
    }
    set.into_iter().collect()
}

/// Neighbourhood graph of a projection, weighted with input distances.
pub fn delaunay_torus(proj: &Projection, d: &DissimilarityMatrix) -> Result<NeighborGraph> {
    let n = proj.len();
    if n < 3 {
        return Err(DbsError::TooFewPoints(n));
    }
    if d.len() != n {
        return Err(DbsError::LengthMismatch(d.len(), n));
    }
    let coords = proj.coords();
    let (w, h) = (proj.grid.width(), proj.grid.height());
    let pairs = match delaunay_torus_coords(&coords, w, h) {
        Some(p) => p,
        None => {
            log::warn!("degenerate layout, falling back to a 6-nearest-neighbour graph");
            knn_graph(&coords, w, h, 6)
        }
    };
    Ok(NeighborGraph::from_pairs(n, pairs, d))
}
