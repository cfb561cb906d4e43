//! Normalized spectral clustering on the generalized problem `L v = λ D v`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::kmeans::{kmeans, KMeansConfig};
use super::Partition;
use crate::error::{Error, Result};

/// Ascending generalized eigenvalues of `(L, D)` with their eigenvectors
/// as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl EigenSpectrum {
    /// Solves `L v = λ D v` for a weight matrix with all degrees positive,
    /// through the symmetric matrix `D^-1/2 L D^-1/2`.
    pub fn new(weights: &DMatrix<f64>) -> Result<Self> {
        let n = weights.nrows();
        if weights.ncols() != n {
            return Err(Error::ShapeMismatch("weight matrix is not square".into()));
        }
        let degrees: Vec<f64> = (0..n).map(|i| weights.row(i).sum()).collect();
        if let Some(i) = degrees.iter().position(|&d| d.is_nan() || d <= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "vertex {i} has zero degree"
            )));
        }
        let inv_sqrt: Vec<f64> = degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
        let mut sym = DMatrix::from_fn(n, n, |i, j| {
            let delta = if i == j { 1.0 } else { 0.0 };
            delta - weights[(i, j)] * inv_sqrt[i] * inv_sqrt[j]
        });
        sym = (&sym + sym.transpose()) * 0.5;
        let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0)
            .ok_or_else(|| Error::Eigen("symmetric eigensolver did not converge".into()))?;
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .total_cmp(&eig.eigenvalues[b])
                .then(a.cmp(&b))
        });
        let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])] * inv_sqrt[r]);
        Ok(Self { values, vectors })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Eigenvector `i` (ascending eigenvalue order) as a column.
    pub fn vector(&self, i: usize) -> nalgebra::DVectorView<'_, f64> {
        self.vectors.column(i)
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Spectral coordinates for a weight matrix, reusable across cluster counts.
/// Zero-degree vertices are kept aside and become singleton clusters.
#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    n: usize,
    active: Vec<usize>,
    spectrum: Option<EigenSpectrum>,
    kmeans: KMeansConfig,
}

impl SpectralEmbedding {
    pub fn new(weights: &DMatrix<f64>) -> Result<Self> {
        let n = weights.nrows();
        if weights.ncols() != n {
            return Err(Error::ShapeMismatch("weight matrix is not square".into()));
        }
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::InvalidArgument(
                "weights must be finite and non-negative".into(),
            ));
        }
        let active: Vec<usize> = (0..n).filter(|&i| weights.row(i).sum() > 0.0).collect();
        let spectrum = if active.is_empty() {
            None
        } else {
            let sub = weights.select_rows(&active).select_columns(&active);
            Some(EigenSpectrum::new(&sub)?)
        };
        Ok(Self {
            n,
            active,
            spectrum,
            kmeans: KMeansConfig::default(),
        })
    }

    pub fn with_kmeans(mut self, cfg: KMeansConfig) -> Self {
        self.kmeans = cfg;
        self
    }

    /// Spectrum of the positive-degree part (`None` when every vertex is
    /// isolated).
    pub fn spectrum(&self) -> Option<&EigenSpectrum> {
        self.spectrum.as_ref()
    }

    /// Vertices with positive degree, i.e. the rows of the spectrum.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    /// Clusters the rows of the `k` smallest eigenvectors with seeded k-means.
    pub fn cluster(&self, k: usize, seed: u64) -> Result<Partition> {
        if k < 2 || k > self.n {
            return Err(Error::InvalidArgument(format!(
                "cluster count {k} outside [2, {}]",
                self.n
            )));
        }
        let mut labels: Vec<usize> = vec![usize::MAX; self.n];
        if let Some(spec) = &self.spectrum {
            let k_eff = k.min(self.active.len());
            let rows: Vec<Vec<f64>> = (0..self.active.len())
                .map(|r| (0..k_eff).map(|c| spec.vectors[(r, c)]).collect())
                .collect();
            let result = kmeans(&rows, k_eff, seed, &self.kmeans);
            for (&v, &l) in self.active.iter().zip(&result.labels) {
                labels[v] = l;
            }
        }
        for (next, l) in (k..).zip(labels.iter_mut().filter(|l| **l == usize::MAX)) {
            *l = next;
        }
        Ok(Partition::from_labels(&labels))
    }
}

/// Normalized spectral clustering into at most `k` clusters (plus one
/// singleton per zero-degree vertex).
pub fn nsc(weights: &DMatrix<f64>, k: usize, seed: u64) -> Result<Partition> {
    SpectralEmbedding::new(weights)?.cluster(k, seed)
}

/// Gaps `(k, λ_{k+1} - λ_k)` for `k = 1..n-1` (1-based eigenvalue index).
pub fn eigengaps(values: &[f64]) -> Vec<(usize, f64)> {
    values
        .windows(2)
        .enumerate()
        .map(|(i, w)| (i + 1, w[1] - w[0]))
        .collect()
}

/// Cluster count with the largest gap `λ_{k+1} - λ_k` over
/// `k_min..=k_max`; the smallest `k` wins ties.
pub fn eigengap_k(values: &[f64], k_min: usize, k_max: usize) -> Result<usize> {
    if k_min < 1 || k_min > k_max || k_max + 1 > values.len() {
        return Err(Error::InvalidArgument(format!(
            "empty eigengap range [{k_min}, {k_max}] for {} eigenvalues",
            values.len()
        )));
    }
    let mut best = (k_min, f64::NEG_INFINITY);
    for (k, gap) in eigengaps(values) {
        if (k_min..=k_max).contains(&k) && gap > best.1 {
            best = (k, gap);
        }
    }
    Ok(best.0)
}
