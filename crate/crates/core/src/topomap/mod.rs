//! Topographic map of a projection: a toroidal Delaunay graph weighted with
//! input-space distances, per-point U-heights and an interpolated,
//! hypsometrically classified heightmap.

mod delaunay;
mod heights;
mod render;

pub use delaunay::{delaunay_torus, delaunay_torus_coords, knn_graph, planar_delaunay_edges, NeighborGraph};
pub use heights::{detect_volcanoes, u_heights};
pub use render::{hypsometric_color, render_heightmap, HeightClass, TopoMap, TopoMapDocument, TOPOMAP_FORMAT_VERSION};
