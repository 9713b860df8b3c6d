use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{DbsError, Result};

/// Class counts up to which the optimal label matching is found by trying
/// every permutation; larger problems use the Hungarian method.
pub const EXHAUSTIVE_LIMIT: usize = 8;

/// Confusion counts between predicted and true classes, with class ids
/// indexed in order of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct Confusion {
    /// `counts[p][t]`
    pub counts: Vec<Vec<i64>>,
    pub pred_sizes: Vec<i64>,
    pub truth_sizes: Vec<i64>,
    pub n: usize,
}

impl Confusion {
    pub fn new<P, T>(pred: &[P], truth: &[T]) -> Result<Self>
    where
        P: Copy + Eq + Hash,
        T: Copy + Eq + Hash,
    {
        if pred.len() != truth.len() {
            return Err(DbsError::LengthMismatch(pred.len(), truth.len()));
        }
        if pred.is_empty() {
            return Err(DbsError::Empty);
        }
        let pi = index_of(pred);
        let ti = index_of(truth);
        let (kp, kt) = (pi.1, ti.1);
        let mut counts = vec![vec![0i64; kt]; kp];
        let mut pred_sizes = vec![0; kp];
        let mut truth_sizes = vec![0; kt];
        for (&p, &t) in pi.0.iter().zip(&ti.0) {
            counts[p][t] += 1;
            pred_sizes[p] += 1;
            truth_sizes[t] += 1;
        }
        Ok(Self {
            counts,
            pred_sizes,
            truth_sizes,
            n: pred.len(),
        })
    }

    fn square(&self) -> Vec<Vec<i64>> {
        let m = self.counts.len().max(self.truth_sizes.len());
        let mut sq = vec![vec![0i64; m]; m];
        for (p, row) in self.counts.iter().enumerate() {
            sq[p][..row.len()].copy_from_slice(row);
        }
        sq
    }
}

fn index_of<T: Copy + Eq + Hash>(labels: &[T]) -> (Vec<usize>, usize) {
    let mut map = HashMap::new();
    let idx = labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect();
    (idx, map.len())
}

/// Optimal one-to-one matching of predicted onto true classes:
/// `assignment[p]` is the matched true class (indices beyond the true class
/// count mean "unmatched"), plus the number of correctly matched points.
pub fn best_assignment(conf: &Confusion) -> (Vec<usize>, i64) {
    let sq = conf.square();
    let (perm, total) = if sq.len() <= EXHAUSTIVE_LIMIT {
        exhaustive_assignment(&sq)
    } else {
        hungarian_assignment(&sq)
    };
    (perm[..conf.counts.len()].to_vec(), total)
}

/// Tries every permutation (Heap's algorithm) of a square gain matrix.
pub fn exhaustive_assignment(gain: &[Vec<i64>]) -> (Vec<usize>, i64) {
    let m = gain.len();
    let mut perm: Vec<usize> = (0..m).collect();
    let score = |p: &[usize]| p.iter().enumerate().map(|(r, &c)| gain[r][c]).sum::<i64>();
    let mut best = (perm.clone(), score(&perm));
    let mut c = vec![0usize; m];
    let mut i = 0;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            let s = score(&perm);
            if s > best.1 {
                best = (perm.clone(), s);
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

/// Maximum-gain assignment by the Hungarian method (potentials form, O(m³)).
pub fn hungarian_assignment(gain: &[Vec<i64>]) -> (Vec<usize>, i64) {
    let m = gain.len();
    if m == 0 {
        return (Vec::new(), 0);
    }
    let maxg = gain.iter().flatten().copied().max().unwrap_or(0);
    let cost = |r: usize, c: usize| maxg - gain[r][c];
    let inf = i64::MAX / 4;
    // 1-based rows/columns, column 0 is the virtual start
    let mut u = vec![0i64; m + 1];
    let mut v = vec![0i64; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=m {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; m];
    for j in 1..=m {
        assignment[p[j] - 1] = j - 1;
    }
    let total = assignment.iter().enumerate().map(|(r, &c)| gain[r][c]).sum();
    (assignment, total)
}

/// Fraction of points correctly labelled under the best bijection between
/// predicted and true classes.
pub fn best_permutation_accuracy<P, T>(pred: &[P], truth: &[T]) -> Result<f64>
where
    P: Copy + Eq + Hash,
    T: Copy + Eq + Hash,
{
    let conf = Confusion::new(pred, truth)?;
    let (_, hits) = best_assignment(&conf);
    Ok(hits as f64 / conf.n as f64)
}

pub fn error_rate<P, T>(pred: &[P], truth: &[T]) -> Result<f64>
where
    P: Copy + Eq + Hash,
    T: Copy + Eq + Hash,
{
    Ok(1.0 - best_permutation_accuracy(pred, truth)?)
}

/// Macro-averaged F1 over the matched class pairs of the best-permutation
/// alignment. Classes left without a partner (when the two labelings have
/// different class counts) do not enter the average.
pub fn f1_score<P, T>(pred: &[P], truth: &[T]) -> Result<f64>
where
    P: Copy + Eq + Hash,
    T: Copy + Eq + Hash,
{
    let conf = Confusion::new(pred, truth)?;
    let (assign, _) = best_assignment(&conf);
    let kt = conf.truth_sizes.len();
    let scores: Vec<f64> = assign
        .iter()
        .enumerate()
        .filter(|&(_, &t)| t < kt)
        .filter_map(|(p, &t)| f1_from_counts(conf.counts[p][t], conf.pred_sizes[p], conf.truth_sizes[t]))
        .collect();
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// F1 of one aligned class from true positives and class sizes; `None` when
/// the class is empty on both sides.
pub fn f1_from_counts(tp: i64, pred_size: i64, truth_size: i64) -> Option<f64> {
    if pred_size == 0 && truth_size == 0 {
        return None;
    }
    if tp == 0 {
        return Some(0.0);
    }
    let p = tp as f64 / pred_size as f64;
    let r = tp as f64 / truth_size as f64;
    Some(2.0 * p * r / (p + r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn relabeling_is_free() {
        assert_eq!(best_permutation_accuracy(&[1, 1, 2, 2], &[2, 2, 1, 1]).unwrap(), 1.0);
    }

    #[test]
    fn one_mistake_in_four() {
        assert_eq!(best_permutation_accuracy(&[1, 2, 2, 2], &[1, 1, 2, 2]).unwrap(), 0.75);
        assert_eq!(error_rate(&[1, 2, 2, 2], &[1, 1, 2, 2]).unwrap(), 0.25);
    }

    #[test]
    fn errors_on_bad_input() {
        assert!(matches!(best_permutation_accuracy::<i32, i32>(&[], &[]), Err(DbsError::Empty)));
        assert!(matches!(best_permutation_accuracy(&[1], &[1, 2]), Err(DbsError::LengthMismatch(1, 2))));
    }

    #[test]
    fn hungarian_agrees_with_exhaustive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let m = rng.random_range(1..=7);
            let gain: Vec<Vec<i64>> = (0..m).map(|_| (0..m).map(|_| rng.random_range(0..20)).collect()).collect();
            assert_eq!(exhaustive_assignment(&gain).1, hungarian_assignment(&gain).1);
        }
    }

    #[test]
    fn twenty_points_four_classes_both_methods() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let pred: Vec<u8> = (0..20).map(|_| rng.random_range(0..4)).collect();
            let truth: Vec<u8> = (0..20).map(|_| rng.random_range(0..4)).collect();
            let sq = Confusion::new(&pred, &truth).unwrap().square();
            assert_eq!(exhaustive_assignment(&sq).1, hungarian_assignment(&sq).1);
        }
    }

    #[test]
    fn many_classes_use_hungarian() {
        // 12 classes, labels rotated: perfect after alignment.
        let truth: Vec<usize> = (0..120).map(|i| i % 12).collect();
        let pred: Vec<usize> = truth.iter().map(|t| (t + 5) % 12).collect();
        assert_eq!(best_permutation_accuracy(&pred, &truth).unwrap(), 1.0);
    }

    #[test]
    fn unequal_class_counts() {
        // three predicted groups against two true ones
        assert_eq!(best_permutation_accuracy(&[1, 1, 2, 3], &[5, 5, 6, 6]).unwrap(), 0.75);
        assert_eq!(best_permutation_accuracy(&[1, 1, 1, 1], &[5, 5, 6, 6]).unwrap(), 0.5);
    }

    #[test]
    fn f1_values() {
        assert_eq!(f1_score(&[3, 3, 1, 1], &[1, 1, 2, 2]).unwrap(), 1.0);
        assert_eq!(f1_from_counts(2, 4, 2), Some(2.0 / 3.0));
        assert_eq!(f1_from_counts(0, 0, 0), None);
        // classes: P=.5,R=1 | perfect | P=1,R=.5
        let f = f1_score(&[1, 1, 2, 2, 3], &[1, 3, 2, 2, 3]).unwrap();
        assert!((f - 7.0 / 9.0).abs() < 1e-15);
        // one class with precision 0.5 and recall 1, the other perfect; the
        // stray point's true class has no partner and is left out
        let f = f1_score(&[1, 1, 2, 2], &[1, 9, 2, 2]).unwrap();
        assert!((f - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn f1_invariant_under_relabeling() {
        let truth = [1, 1, 2, 2, 3, 3, 3, 1];
        let pred = [2, 2, 2, 1, 3, 3, 1, 2];
        let swapped: Vec<i32> = pred.iter().map(|&p| [0, 3, 1, 2][p as usize]).collect();
        assert_eq!(f1_score(&pred, &truth).unwrap(), f1_score(&swapped, &truth).unwrap());
    }
}
