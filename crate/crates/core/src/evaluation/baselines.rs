use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::clustering::{canonical_labels, hierarchical_cluster, ClusterMode, GeodesicMatrix};
use crate::data::{Dataset, DissimilarityMatrix};
use crate::error::{DbsError, Result};

pub const KMEANS_MAX_ITER: usize = 100;

/// Lloyd's k-means from `k` distinct random data points, until the
/// assignment stops changing or 100 iterations. Labels ordered by size.
pub fn baseline_kmeans(ds: &Dataset, k: usize, seed: u64) -> Result<Vec<usize>> {
    let (n, dim) = (ds.len(), ds.dim());
    if k == 0 || k > n {
        return Err(DbsError::InvalidK { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<Vec<f64>> = rand::seq::index::sample(&mut rng, n, k)
        .into_iter()
        .map(|i| ds.row(i).to_vec())
        .collect();
    let mut assign = vec![usize::MAX; n];
    for _ in 0..KMEANS_MAX_ITER {
        let mut changed = false;
        for (i, a) in assign.iter_mut().enumerate() {
            let row = ds.row(i);
            let mut best = (f64::INFINITY, 0);
            for (c, cen) in centroids.iter().enumerate() {
                let d: f64 = row.iter().zip(cen).map(|(x, y)| (x - y) * (x - y)).sum();
                if d < best.0 {
                    best = (d, c);
                }
            }
            if *a != best.1 {
                *a = best.1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, &a) in assign.iter().enumerate() {
            counts[a] += 1;
            for (s, x) in sums[a].iter_mut().zip(ds.row(i)) {
                *s += x;
            }
        }
        for c in 0..k {
            // an emptied cluster keeps its previous centroid
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    Ok(canonical_labels(&assign))
}

/// Single linkage directly on the input dissimilarities.
pub fn baseline_single_linkage(d: &DissimilarityMatrix, k: usize) -> Result<Vec<usize>> {
    Ok(hierarchical_cluster(&GeodesicMatrix::from_dissimilarity(d), k, ClusterMode::Connected)?.labels)
}

/// Ward (`ward.D2`) directly on the input dissimilarities.
pub fn baseline_ward(d: &DissimilarityMatrix, k: usize) -> Result<Vec<usize>> {
    Ok(hierarchical_cluster(&GeodesicMatrix::from_dissimilarity(d), k, ClusterMode::Compact)?.labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::euclidean_dissimilarity;
    use crate::evaluation::best_permutation_accuracy;
    use rand_distr::{Distribution, Normal};

    fn blobs(seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 0.3).unwrap();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (c, cx) in [(1, -5.0), (2, 5.0)] {
            for _ in 0..50 {
                rows.push(vec![cx + noise.sample(&mut rng), noise.sample(&mut rng)]);
                labels.push(c);
            }
        }
        Dataset::new("blobs", rows, Some(labels)).unwrap()
    }

    #[test]
    fn kmeans_separates_blobs() {
        let mut perfect = 0;
        for seed in 0..20 {
            let ds = blobs(seed);
            let l = baseline_kmeans(&ds, 2, seed).unwrap();
            if best_permutation_accuracy(&l, ds.labels().unwrap()).unwrap() == 1.0 {
                perfect += 1;
            }
        }
        assert!(perfect >= 19, "{perfect}/20");
    }

    #[test]
    fn kmeans_is_seeded() {
        let ds = blobs(3);
        assert_eq!(baseline_kmeans(&ds, 3, 7).unwrap(), baseline_kmeans(&ds, 3, 7).unwrap());
        assert!(matches!(baseline_kmeans(&ds, 101, 0), Err(DbsError::InvalidK { .. })));
        assert!(matches!(baseline_kmeans(&ds, 0, 0), Err(DbsError::InvalidK { .. })));
    }

    #[test]
    fn linkage_baselines_on_blobs() {
        let ds = blobs(1);
        let d = euclidean_dissimilarity(&ds);
        for l in [baseline_single_linkage(&d, 2).unwrap(), baseline_ward(&d, 2).unwrap()] {
            assert_eq!(best_permutation_accuracy(&l, ds.labels().unwrap()).unwrap(), 1.0);
        }
    }
}
