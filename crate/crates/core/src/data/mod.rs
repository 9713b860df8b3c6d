//! Input data: feature datasets, dissimilarity matrices, CSV I/O and the
//! synthetic FCPS-style benchmark generators.

mod dataset;
mod dissimilarity;
pub mod fcps;
pub mod io;

pub use dataset::Dataset;
pub use dissimilarity::{euclidean_dissimilarity, pairwise_euclidean, percentile, DissimilarityMatrix, DistanceStats};
pub use fcps::{generate_fcps, FcpsName};
