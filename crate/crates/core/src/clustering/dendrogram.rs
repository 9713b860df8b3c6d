use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{DbsError, Result};

/// One agglomeration step. Leaves are `0..n`; merge `i` creates node `n + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
    leaf_order: Vec<usize>,
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Attaches `b`'s root under `a`'s root.
    pub(crate) fn union_into(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[rb] = ra;
        }
    }
}

impl Dendrogram {
    /// Builds a dendrogram from `n - 1` merges given as pairs of member
    /// leaves plus heights, in any order. Merges are stably sorted by height
    /// and renumbered so node ids follow the sorted order.
    pub fn from_leaf_pairs(n: usize, mut pairs: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(DbsError::Empty);
        }
        if pairs.len() != n - 1 {
            return Err(DbsError::LengthMismatch(pairs.len(), n - 1));
        }
        pairs.sort_by(|a, b| a.2.total_cmp(&b.2));
        // node id and size per union-find root
        let mut uf = UnionFind::new(n);
        let mut node: Vec<usize> = (0..n).collect();
        let mut size = vec![1usize; n];
        let mut merges = Vec::with_capacity(n - 1);
        for (i, &(a, b, h)) in pairs.iter().enumerate() {
            let (ra, rb) = (uf.find(a), uf.find(b));
            if ra == rb {
                return Err(DbsError::InvalidParameter(format!("merge {i} joins a cluster with itself")));
            }
            let (x, y) = (node[ra], node[rb]);
            let s = size[ra] + size[rb];
            merges.push(Merge {
                left: x.min(y),
                right: x.max(y),
                height: h,
                size: s,
            });
            uf.union_into(ra, rb);
            node[ra] = n + i;
            size[ra] = s;
        }
        let leaf_order = Self::order(n, &merges);
        Ok(Self { n, merges, leaf_order })
    }

    fn order(n: usize, merges: &[Merge]) -> Vec<usize> {
        if merges.is_empty() {
            return (0..n).collect();
        }
        let mut out = Vec::with_capacity(n);
        let mut stack = vec![n + merges.len() - 1];
        while let Some(v) = stack.pop() {
            if v < n {
                out.push(v);
            } else {
                let m = &merges[v - n];
                stack.push(m.right);
                stack.push(m.left);
            }
        }
        out
    }

    pub fn n_leaves(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn heights(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.height).collect()
    }

    pub fn leaf_order(&self) -> &[usize] {
        &self.leaf_order
    }

    /// Flat partition into `k` groups: labels `1..=k`, largest group first,
    /// ties broken by the smallest member id.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>> {
        let n = self.n;
        if k == 0 || k > n {
            return Err(DbsError::InvalidK { k, n });
        }
        let mut uf = UnionFind::new(2 * n - 1);
        for (i, m) in self.merges.iter().take(n - k).enumerate() {
            uf.union_into(n + i, m.left);
            uf.union_into(n + i, m.right);
        }
        let roots: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
        Ok(canonical_labels(&roots))
    }

    /// One merge per line: `left right height`.
    pub fn to_merge_table(&self) -> String {
        let mut s = String::new();
        for m in &self.merges {
            let _ = writeln!(s, "{} {} {}", m.left, m.right, m.height);
        }
        s
    }
}

/// Relabels arbitrary group ids to `1..=k` by decreasing group size, ties by
/// the smallest point id in the group.
pub fn canonical_labels<T: Copy + Eq + std::hash::Hash>(groups: &[T]) -> Vec<usize> {
    use std::collections::HashMap;
    let mut info: HashMap<T, (usize, usize)> = HashMap::new();
    for (i, &g) in groups.iter().enumerate() {
        let e = info.entry(g).or_insert((0, i));
        e.0 += 1;
    }
    let mut order: Vec<(T, usize, usize)> = info.into_iter().map(|(g, (s, f))| (g, s, f)).collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
    let map: HashMap<T, usize> = order.iter().enumerate().map(|(r, e)| (e.0, r + 1)).collect();
    groups.iter().map(|g| map[g]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Dendrogram {
        Dendrogram::from_leaf_pairs(4, vec![(2, 3, 0.5), (0, 1, 1.0), (0, 3, 4.0)]).unwrap()
    }

    #[test]
    fn renumbers_like_scipy() {
        let d = small();
        assert_eq!(
            d.merges(),
            &[
                Merge { left: 2, right: 3, height: 0.5, size: 2 },
                Merge { left: 0, right: 1, height: 1.0, size: 2 },
                Merge { left: 4, right: 5, height: 4.0, size: 4 },
            ]
        );
        assert_eq!(d.leaf_order(), &[2, 3, 0, 1]);
        assert_eq!(d.to_merge_table(), "2 3 0.5\n0 1 1\n4 5 4\n");
    }

    #[test]
    fn cut_extremes_and_labels() {
        let d = small();
        assert_eq!(d.cut(1).unwrap(), vec![1, 1, 1, 1]);
        assert_eq!(d.cut(4).unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(d.cut(2).unwrap(), vec![1, 1, 2, 2]);
        assert_eq!(d.cut(3).unwrap(), vec![2, 3, 1, 1]);
        assert!(matches!(d.cut(0), Err(DbsError::InvalidK { .. })));
        assert!(matches!(d.cut(5), Err(DbsError::InvalidK { .. })));
    }

    #[test]
    fn canonical_order() {
        assert_eq!(canonical_labels(&[9, 9, 4, 4, 4, 7]), vec![2, 2, 1, 1, 1, 3]);
        assert_eq!(canonical_labels(&['b', 'a', 'a', 'b']), vec![1, 2, 2, 1]);
    }

    #[test]
    fn self_merge_rejected() {
        assert!(Dendrogram::from_leaf_pairs(3, vec![(0, 1, 1.0), (1, 0, 2.0)]).is_err());
    }
}
