//! Community detection: Louvain modularity optimization and normalized
//! spectral clustering.

mod kmeans;
mod louvain;
mod spectral;

use std::collections::HashMap;
use std::hash::Hash;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use kmeans::{kmeans, KMeansConfig, KMeansResult};
pub use louvain::{louvain, louvain_seeded};
pub use spectral::{eigengap_k, eigengaps, nsc, EigenSpectrum, SpectralEmbedding};

/// Assignment of every vertex to one cluster. Cluster ids are `0..k`,
/// numbered by first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Canonical partition from arbitrary labels.
    pub fn from_labels<T: Hash + Eq>(labels: &[T]) -> Self {
        let mut ids: HashMap<&T, usize> = HashMap::new();
        let assignment = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l).or_insert(next)
            })
            .collect();
        Self {
            assignment,
            k: ids.len(),
        }
    }

    /// Every vertex in its own cluster.
    pub fn singletons(n: usize) -> Self {
        Self {
            assignment: (0..n).collect(),
            k: n,
        }
    }

    /// All vertices in one cluster.
    pub fn whole(n: usize) -> Self {
        Self {
            assignment: vec![0; n],
            k: usize::from(n > 0),
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn cluster_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    /// Number of non-empty clusters.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Members of each cluster, ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// Restriction to `vertices` (re-canonicalized).
    pub fn restrict(&self, vertices: &[usize]) -> Self {
        let labels: Vec<usize> = vertices.iter().map(|&v| self.assignment[v]).collect();
        Self::from_labels(&labels)
    }

    /// Writes `stock,cluster`.
    pub fn write_csv(&self, stocks: &[String], path: &Path) -> Result<()> {
        if stocks.len() != self.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} stocks for a partition of {} vertices",
                stocks.len(),
                self.len()
            )));
        }
        let mut out = String::from("stock,cluster\n");
        for (stock, c) in stocks.iter().zip(&self.assignment) {
            out.push_str(&format!("{stock},{c}\n"));
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

/// Total weight `sum_ij w_ij`, i.e. twice the edge weight of the graph.
fn total_weight(weights: &DMatrix<f64>) -> f64 {
    weights.iter().sum()
}

/// Newman modularity of `partition` on a symmetric non-negative weight
/// matrix:
///
/// `Q = 1/(2S) * sum_ij [w_ij - k_i k_j / (2S)] delta(c_i, c_j)`
///
/// with `k_i` the row sums and `2S = sum_ij w_ij`.
pub fn modularity(weights: &DMatrix<f64>, partition: &Partition) -> Result<f64> {
    let n = weights.nrows();
    if weights.ncols() != n || partition.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} weights for a partition of {} vertices",
            n,
            weights.ncols(),
            partition.len()
        )));
    }
    let two_s = total_weight(weights);
    if two_s.is_nan() || two_s <= 0.0 {
        return Err(Error::ZeroTotalWeight);
    }
    let mut internal = vec![0.0; partition.k()];
    let mut tot = vec![0.0; partition.k()];
    for i in 0..n {
        let ci = partition.cluster_of(i);
        for j in 0..n {
            let w = weights[(i, j)];
            tot[ci] += w;
            if partition.cluster_of(j) == ci {
                internal[ci] += w;
            }
        }
    }
    Ok(internal
        .iter()
        .zip(&tot)
        .map(|(&inside, &t)| inside / two_s - (t / two_s) * (t / two_s))
        .sum())
}
