//! Databionic swarm: self-organised projection of a dissimilarity matrix
//! onto a toroidal hex grid, a topographic map of the result, and
//! hierarchical clustering of geodesic distances over the projection.

pub mod clustering;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod grid;
pub mod pipeline;
pub mod pswarm;
pub mod topomap;

pub use clustering::{ClusterMode, ClusterResult};
pub use error::{DbsError, Result};
pub use pipeline::{dbs_cluster, DbsModel, DbsOutput};
