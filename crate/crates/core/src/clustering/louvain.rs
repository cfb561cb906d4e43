//! Louvain modularity optimization.
//!
//! Phase one moves single vertices to the neighbouring community with the
//! largest modularity gain; phase two collapses communities into weighted
//! vertices (internal weight becomes a self-loop) and repeats phase one on
//! the collapsed graph. When the collapsed levels settle, phase one is run
//! again on the original vertices from the current partition; the method
//! stops only once that pass moves nothing, so the final partition is
//! locally optimal for every single-vertex move.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{total_weight, Partition};
use crate::error::{Error, Result};

/// Sparse weighted graph with self-loops.
struct LevelGraph {
    neighbors: Vec<Vec<(usize, f64)>>,
    strength: Vec<f64>,
    two_s: f64,
}

impl LevelGraph {
    fn from_dense(w: &DMatrix<f64>) -> Self {
        let n = w.nrows();
        let mut neighbors = vec![Vec::new(); n];
        let mut strength = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                let x = w[(i, j)];
                strength[i] += x;
                if i != j && x != 0.0 {
                    neighbors[i].push((j, x));
                }
            }
        }
        Self {
            neighbors,
            strength,
            two_s: total_weight(w),
        }
    }

    fn n(&self) -> usize {
        self.strength.len()
    }

    /// Collapses vertices by `membership` (ids `0..k`).
    fn aggregate(&self, membership: &[usize], k: usize) -> Self {
        let mut w = DMatrix::zeros(k, k);
        for (i, nbrs) in self.neighbors.iter().enumerate() {
            let ci = membership[i];
            let mut off = 0.0;
            for &(j, x) in nbrs {
                w[(ci, membership[j])] += x;
                off += x;
            }
            // self-loop weight of i carries over to its community
            w[(ci, ci)] += self.strength[i] - off;
        }
        Self::from_dense(&w)
    }
}

/// Repeated passes of single-vertex moves over `order` until a pass moves
/// nothing. Returns whether any vertex moved.
fn local_moves(g: &LevelGraph, community: &mut [usize], order: &[usize]) -> bool {
    let n = g.n();
    let mut tot = vec![0.0; n];
    for v in 0..n {
        tot[community[v]] += g.strength[v];
    }
    let eps = g.two_s * 1e-13;
    let mut link = vec![0.0; n];
    let mut is_touched = vec![false; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut any = false;
    loop {
        let mut moved = false;
        for &v in order {
            let own = community[v];
            let k_v = g.strength[v];
            for &(u, x) in &g.neighbors[v] {
                let c = community[u];
                if !is_touched[c] {
                    is_touched[c] = true;
                    touched.push(c);
                }
                link[c] += x;
            }
            tot[own] -= k_v;
            let gain = |c: usize, link_c: f64| link_c - k_v * tot[c] / g.two_s;

            let mut best = own;
            let mut best_gain = gain(own, link[own]);
            touched.sort_unstable();
            for &c in &touched {
                if c == own {
                    continue;
                }
                let g_c = gain(c, link[c]);
                if g_c > best_gain + eps {
                    best = c;
                    best_gain = g_c;
                }
            }
            tot[best] += k_v;
            community[v] = best;
            if best != own {
                moved = true;
            }
            for &c in &touched {
                link[c] = 0.0;
                is_touched[c] = false;
            }
            touched.clear();
        }
        if !moved {
            return any;
        }
        any = true;
    }
}

/// Renumbers `labels` by first appearance along `order`.
fn compact(labels: &mut [usize], order: &[usize]) -> usize {
    let mut map = vec![usize::MAX; labels.len()];
    let mut next = 0;
    for &v in order {
        let l = labels[v];
        if map[l] == usize::MAX {
            map[l] = next;
            next += 1;
        }
    }
    for l in labels.iter_mut() {
        *l = map[*l];
    }
    next
}

/// Louvain communities visiting vertices in `order` (a permutation of
/// `0..n`). Different orders may give different partitions.
///
/// Ties: a vertex stays put unless some neighbouring community strictly
/// beats its own; among equally good alternatives the lowest community id
/// wins.
pub fn louvain(weights: &DMatrix<f64>, order: &[usize]) -> Result<Partition> {
    let n = weights.nrows();
    if weights.ncols() != n {
        return Err(Error::ShapeMismatch("weight matrix is not square".into()));
    }
    let mut seen = vec![false; n];
    if order.len() != n
        || order
            .iter()
            .any(|&v| v >= n || std::mem::replace(&mut seen[v], true))
    {
        return Err(Error::InvalidArgument(
            "vertex order is not a permutation".into(),
        ));
    }
    let base = LevelGraph::from_dense(weights);
    if base.two_s.is_nan() || base.two_s <= 0.0 {
        return Err(Error::ZeroTotalWeight);
    }

    let mut membership: Vec<usize> = (0..n).collect();
    let mut first = true;
    loop {
        let moved = local_moves(&base, &mut membership, order);
        if !moved && !first {
            break;
        }
        first = false;
        loop {
            let k = compact(&mut membership, order);
            let level = base.aggregate(&membership, k);
            let mut upper: Vec<usize> = (0..k).collect();
            let level_order: Vec<usize> = (0..k).collect();
            if !local_moves(&level, &mut upper, &level_order) {
                break;
            }
            for c in membership.iter_mut() {
                *c = upper[*c];
            }
        }
    }
    compact(&mut membership, order);
    Ok(Partition::from_labels(&membership))
}

/// Louvain with a vertex order drawn from `seed`.
pub fn louvain_seeded(weights: &DMatrix<f64>, seed: u64) -> Result<Partition> {
    let mut order: Vec<usize> = (0..weights.nrows()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    louvain(weights, &order)
}

#[cfg(test)]
mod tests {
    use super::super::modularity;
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn two_triangles() -> DMatrix<f64> {
        let mut w = DMatrix::zeros(6, 6);
        for (a, b) in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)] {
            w[(a, b)] = 1.0;
            w[(b, a)] = 1.0;
        }
        w
    }

    fn random_weights(n: usize, p: f64, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < p {
                    let x = rng.random::<f64>();
                    w[(i, j)] = x;
                    w[(j, i)] = x;
                }
            }
        }
        w
    }

    /// Best modularity gain available to any single vertex moving into a
    /// neighbouring community, by direct re-evaluation.
    pub(crate) fn best_single_move_gain(w: &DMatrix<f64>, p: &Partition) -> f64 {
        let n = w.nrows();
        let q = modularity(w, p).unwrap();
        let mut best = f64::NEG_INFINITY;
        for v in 0..n {
            let mut targets: Vec<usize> = (0..n)
                .filter(|&u| u != v && w[(u, v)] > 0.0)
                .map(|u| p.cluster_of(u))
                .filter(|&c| c != p.cluster_of(v))
                .collect();
            targets.dedup();
            for c in targets {
                let mut labels = p.assignment().to_vec();
                labels[v] = c;
                let q2 = modularity(w, &Partition::from_labels(&labels)).unwrap();
                best = best.max(q2 - q);
            }
        }
        best
    }

    #[test]
    fn two_triangles_split_for_any_order() {
        let w = two_triangles();
        let orders = [[0, 1, 2, 3, 4, 5], [5, 4, 3, 2, 1, 0], [3, 0, 4, 1, 5, 2]];
        for order in orders {
            let p = louvain(&w, &order).unwrap();
            assert_eq!(p.k(), 2);
            assert_eq!(p.cluster_of(0), p.cluster_of(2));
            assert_eq!(p.cluster_of(3), p.cluster_of(5));
            assert_ne!(p.cluster_of(0), p.cluster_of(3));
        }
    }

    /// Every set partition of `0..n` as canonical label vectors.
    fn all_partitions(n: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![0]];
        for _ in 1..n {
            let mut next = Vec::new();
            for p in &out {
                let k = p.iter().max().unwrap() + 1;
                for c in 0..=k {
                    let mut q = p.clone();
                    q.push(c);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }

    #[test]
    fn complete_k5_stays_whole() {
        let w = DMatrix::from_fn(5, 5, |i, j| if i == j { 0.0 } else { 1.0 });
        let p = louvain(&w, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(p.k(), 1);
        // exhaustive: no partition of K5 beats the single community (Q = 0)
        let all = all_partitions(5);
        assert_eq!(all.len(), 52);
        let best = all
            .iter()
            .map(|l| modularity(&w, &Partition::from_labels(l)).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(best <= modularity(&w, &p).unwrap() + 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let w = two_triangles();
        assert!(louvain(&w, &[0, 1, 2]).is_err());
        assert!(louvain(&w, &[0, 0, 1, 2, 3, 4]).is_err());
        assert!(matches!(
            louvain(&DMatrix::zeros(3, 3), &[0, 1, 2]),
            Err(Error::ZeroTotalWeight)
        ));
    }

    #[test]
    fn seeded_is_reproducible() {
        let w = random_weights(30, 0.2, 5);
        assert_eq!(
            louvain_seeded(&w, 9).unwrap(),
            louvain_seeded(&w, 9).unwrap()
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn louvain_is_locally_optimal(n in 4usize..30, p in 0.1f64..0.6, seed in 0u64..10_000, order_seed in 0u64..100) {
            let w = random_weights(n, p, seed);
            prop_assume!(w.iter().sum::<f64>() > 0.0);
            let part = louvain_seeded(&w, order_seed).unwrap();
            let q = modularity(&w, &part).unwrap();
            prop_assert!(q >= modularity(&w, &Partition::singletons(n)).unwrap());
            prop_assert!(best_single_move_gain(&w, &part) <= 1e-12);
        }
    }
}
