use super::{Dendrogram, GeodesicMatrix};
use crate::error::{DbsError, Result};

/// Single linkage via a Prim minimum spanning tree; the sorted tree edges are
/// exactly the merges.
pub fn single_linkage(g: &GeodesicMatrix) -> Result<Dendrogram> {
    Dendrogram::from_leaf_pairs(g.len(), minimum_spanning_tree(g)?)
}

/// Prim on the dense matrix. Edges come out in insertion order as
/// `(tree vertex, new vertex, weight)`.
pub fn minimum_spanning_tree(g: &GeodesicMatrix) -> Result<Vec<(usize, usize, f64)>> {
    let n = g.len();
    if n == 0 {
        return Err(DbsError::Empty);
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut from = vec![0usize; n];
    let mut edges = Vec::with_capacity(n - 1);
    let mut v = 0;
    in_tree[0] = true;
    for _ in 1..n {
        let row = g.row(v);
        let mut next = usize::MAX;
        let mut next_d = f64::INFINITY;
        for u in 0..n {
            if in_tree[u] {
                continue;
            }
            if row[u] < best[u] {
                best[u] = row[u];
                from[u] = v;
            }
            if best[u] < next_d || next == usize::MAX {
                next_d = best[u];
                next = u;
            }
        }
        if !next_d.is_finite() {
            return Err(DbsError::InvalidMatrix("non-finite distance in linkage input".into()));
        }
        in_tree[next] = true;
        edges.push((from[next], next, next_d));
        v = next;
    }
    Ok(edges)
}

/// Ward linkage with the `ward.D2` convention: Lance–Williams on squared
/// distances, merge heights reported on the original scale. Nearest-neighbour
/// chain, O(n²) time and memory.
pub fn ward_linkage(g: &GeodesicMatrix) -> Result<Dendrogram> {
    let n = g.len();
    if n == 0 {
        return Err(DbsError::Empty);
    }
    let mut d2: Vec<f64> = g.as_flat().iter().map(|v| v * v).collect();
    if d2.iter().any(|v| !v.is_finite()) {
        return Err(DbsError::InvalidMatrix("non-finite distance in linkage input".into()));
    }
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    // a leaf inside each slot's cluster
    let rep: Vec<usize> = (0..n).collect();
    let mut pairs = Vec::with_capacity(n.saturating_sub(1));
    let mut chain: Vec<usize> = Vec::with_capacity(n);
    for _ in 1..n {
        if chain.is_empty() {
            chain.push(active.iter().position(|&a| a).unwrap());
        }
        let (a, b) = loop {
            let a = *chain.last().unwrap();
            let prev = if chain.len() >= 2 { Some(chain[chain.len() - 2]) } else { None };
            // start from the predecessor so ties keep the chain reciprocal
            let (mut b, mut bd) = match prev {
                Some(p) => (p, d2[a * n + p]),
                None => (usize::MAX, f64::INFINITY),
            };
            for u in 0..n {
                if u != a && active[u] && (d2[a * n + u] < bd || b == usize::MAX) {
                    b = u;
                    bd = d2[a * n + u];
                }
            }
            if Some(b) == prev {
                chain.pop();
                chain.pop();
                break (a, b);
            }
            chain.push(b);
        };
        let dab = d2[a * n + b];
        pairs.push((rep[a], rep[b], dab.sqrt()));
        // merged cluster lives in slot `keep`
        let (keep, gone) = (a.min(b), a.max(b));
        let (na, nb) = (size[a] as f64, size[b] as f64);
        for k in 0..n {
            if !active[k] || k == a || k == b {
                continue;
            }
            let nk = size[k] as f64;
            let v = ((na + nk) * d2[a * n + k] + (nb + nk) * d2[b * n + k] - nk * dab) / (na + nb + nk);
            let v = v.max(0.0);
            d2[keep * n + k] = v;
            d2[k * n + keep] = v;
        }
        active[gone] = false;
        size[keep] += size[gone];
    }
    Dendrogram::from_leaf_pairs(n, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DissimilarityMatrix;
    use rand::{Rng, SeedableRng};

    fn matrix(rows: Vec<Vec<f64>>) -> GeodesicMatrix {
        GeodesicMatrix::from_dissimilarity(&DissimilarityMatrix::from_rows(rows).unwrap())
    }

    fn random_points(seed: u64, n: usize) -> Vec<Vec<f64>> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| vec![rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)]).collect()
    }

    fn euclid(p: &[Vec<f64>]) -> GeodesicMatrix {
        let rows = p
            .iter()
            .map(|a| p.iter().map(|b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()).collect())
            .collect();
        matrix(rows)
    }

    /// Naive O(n³) Ward on point coordinates: merge the pair whose union
    /// has the smallest increase in within-cluster sum of squares.
    fn naive_ward_heights(p: &[Vec<f64>]) -> Vec<f64> {
        let mut clusters: Vec<Vec<usize>> = (0..p.len()).map(|i| vec![i]).collect();
        let centroid = |c: &[usize]| {
            let mut m = [0.0, 0.0];
            for &i in c {
                m[0] += p[i][0];
                m[1] += p[i][1];
            }
            [m[0] / c.len() as f64, m[1] / c.len() as f64]
        };
        let mut heights = Vec::new();
        while clusters.len() > 1 {
            let mut best = (0, 1, f64::INFINITY);
            for i in 0..clusters.len() {
                for j in i + 1..clusters.len() {
                    let (ci, cj) = (centroid(&clusters[i]), centroid(&clusters[j]));
                    let (ni, nj) = (clusters[i].len() as f64, clusters[j].len() as f64);
                    let sq = (ci[0] - cj[0]).powi(2) + (ci[1] - cj[1]).powi(2);
                    let h = (2.0 * ni * nj / (ni + nj) * sq).sqrt();
                    if h < best.2 {
                        best = (i, j, h);
                    }
                }
            }
            let cj = clusters.remove(best.1);
            clusters[best.0].extend(cj);
            heights.push(best.2);
        }
        heights.sort_by(f64::total_cmp);
        heights
    }

    #[test]
    fn hand_traced_single_linkage() {
        let g = matrix(vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 2.0], vec![3.0, 2.0, 0.0]]);
        let d = single_linkage(&g).unwrap();
        assert_eq!(d.heights(), vec![1.0, 2.0]);
        assert_eq!(d.cut(2).unwrap(), vec![1, 1, 2]);
    }

    #[test]
    fn ward_matches_centroid_formulation() {
        for seed in 0..5 {
            let p = random_points(seed, 25);
            let d = ward_linkage(&euclid(&p)).unwrap();
            let oracle = naive_ward_heights(&p);
            for (a, b) in d.heights().iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-9 * b.max(1.0), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn ward_heights_monotone() {
        let p = random_points(11, 60);
        let h = ward_linkage(&euclid(&p)).unwrap().heights();
        assert!(h.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn ward_three_points() {
        // d(0,1)=1 merges first; then ward.D2 update with sizes 1,1,1.
        let g = matrix(vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 2.0], vec![3.0, 2.0, 0.0]]);
        let d = ward_linkage(&g).unwrap();
        let expect = ((2.0 * 9.0 + 2.0 * 4.0 - 1.0) / 3.0f64).sqrt();
        assert_eq!(d.heights()[0], 1.0);
        assert!((d.heights()[1] - expect).abs() < 1e-12);
    }

    #[test]
    fn two_blobs_split_cleanly() {
        let mut p = random_points(2, 20);
        for (i, q) in p.iter_mut().enumerate() {
            q[0] = q[0] * 0.05 + if i < 12 { 0.0 } else { 10.0 };
            q[1] *= 0.05;
        }
        let g = euclid(&p);
        for d in [single_linkage(&g).unwrap(), ward_linkage(&g).unwrap()] {
            let l = d.cut(2).unwrap();
            assert!(l[..12].iter().all(|&x| x == 1));
            assert!(l[12..].iter().all(|&x| x == 2));
        }
    }
}
