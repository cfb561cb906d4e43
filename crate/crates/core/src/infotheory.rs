//! Entropy, mutual information, and the NMI similarity matrix. All
//! logarithms are base 2.

use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::{
    bin_series_with, joint_histogram, marginal_distribution, BinAssignment, Binning, Distribution,
    JointDistribution, ReturnMatrix,
};

// Sums terms in sorted order: a transposed joint table gives the identical bits.
fn plogp_sum(p: &[f64]) -> f64 {
    let mut terms: Vec<f64> = p
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .collect();
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

/// Shannon entropy in bits, `0 log 0 = 0`.
pub fn entropy(dist: &Distribution) -> f64 {
    plogp_sum(dist.probs())
}

pub fn joint_entropy(joint: &JointDistribution) -> f64 {
    plogp_sum(joint.probs())
}

/// `I = H(X) + H(Y) - H(X,Y)`, clamped at zero for rounding noise.
pub fn mutual_information(hx: f64, hy: f64, hxy: f64) -> Result<f64> {
    let i = hx + hy - hxy;
    if i < -1e-9 {
        return Err(Error::InconsistentEntropies(i));
    }
    Ok(i.max(0.0))
}

/// `2 I / (H(X) + H(Y))`. Two constant series carry no measurable shared
/// information and score 0.
pub fn nmi(i_xy: f64, hx: f64, hy: f64) -> f64 {
    let denom = hx + hy;
    if denom <= 0.0 {
        log::warn!("NMI of two zero-entropy series defined as 0");
        return 0.0;
    }
    2.0 * i_xy / denom
}

/// NMI between two binned series sharing the same `q`.
pub fn nmi_of_bins(a: &BinAssignment, b: &BinAssignment) -> Result<f64> {
    let hx = entropy(&marginal_distribution(a));
    let hy = entropy(&marginal_distribution(b));
    let hxy = joint_entropy(&joint_histogram(a, b)?);
    Ok(nmi(mutual_information(hx, hy, hxy)?, hx, hy))
}

/// Symmetric NMI matrix with a zero diagonal: the weighted complete graph
/// over the stocks.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    stocks: Vec<String>,
    s: DMatrix<f64>,
}

impl SimilarityMatrix {
    /// Validates symmetry, zero diagonal, and entries in `[0, 1 + 1e-9]`.
    pub fn new(stocks: Vec<String>, s: DMatrix<f64>) -> Result<Self> {
        let n = stocks.len();
        if s.nrows() != n || s.ncols() != n {
            return Err(Error::ShapeMismatch(format!(
                "{n} stocks but a {}x{} matrix",
                s.nrows(),
                s.ncols()
            )));
        }
        for i in 0..n {
            if s[(i, i)] != 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "diagonal entry {i} is {}, expected 0",
                    s[(i, i)]
                )));
            }
            for j in (i + 1)..n {
                let v = s[(i, j)];
                if v != s[(j, i)] {
                    return Err(Error::InvalidArgument(format!(
                        "matrix not symmetric at ({i}, {j})"
                    )));
                }
                if !(0.0..=1.0 + 1e-9).contains(&v) {
                    return Err(Error::InvalidArgument(format!(
                        "similarity {v} at ({i}, {j}) outside [0, 1]"
                    )));
                }
            }
        }
        Ok(Self { stocks, s })
    }

    pub fn stocks(&self) -> &[String] {
        &self.stocks
    }

    pub fn n(&self) -> usize {
        self.stocks.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.s[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    /// Restriction to the listed stocks, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        let k = indices.len();
        let s = DMatrix::from_fn(k, k, |a, b| self.s[(indices[a], indices[b])]);
        Self {
            stocks: indices.iter().map(|&i| self.stocks[i].clone()).collect(),
            s,
        }
    }

    /// Multiplies every entry by `c`; the result may leave `[0, 1]` and is
    /// meant for invariance checks on the filters.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            stocks: self.stocks.clone(),
            s: &self.s * c,
        }
    }

    /// CSV with the stock list as header and `n` rows of `n` values, each at
    /// 17 significant digits.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str(&self.stocks.join(","));
        out.push('\n');
        for i in 0..self.n() {
            let row: Vec<String> = (0..self.n())
                .map(|j| format!("{:.16e}", self.s[(i, j)]))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let parse_err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line: line as u64 + 1,
            message,
        };
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(0, "empty similarity file".into()))?;
        let stocks: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let n = stocks.len();
        let mut values = Vec::with_capacity(n * n);
        let mut rows = 0;
        for (line, text) in lines {
            let row: Vec<f64> = text
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|_| parse_err(line, format!("bad number `{}`", c.trim())))
                })
                .collect::<Result<_>>()?;
            if row.len() != n {
                return Err(parse_err(
                    line,
                    format!("expected {n} values, got {}", row.len()),
                ));
            }
            values.extend(row);
            rows += 1;
        }
        if rows != n {
            return Err(parse_err(0, format!("expected {n} rows, got {rows}")));
        }
        Self::new(stocks, DMatrix::from_row_slice(n, n, &values))
    }
}

/// Pairwise NMI over all stocks with a shared bin count `q`.
///
/// Each series is binned once; each unordered pair is computed once and
/// mirrored, so the result is exactly symmetric and independent of the
/// parallel schedule.
pub fn similarity_matrix(returns: &ReturnMatrix, q: usize) -> Result<SimilarityMatrix> {
    similarity_matrix_with(returns, q, Binning::Quantile)
}

pub fn similarity_matrix_with(
    returns: &ReturnMatrix,
    q: usize,
    binning: Binning,
) -> Result<SimilarityMatrix> {
    let n = returns.n_stocks();
    let bins: Vec<BinAssignment> = (0..n)
        .map(|i| bin_series_with(returns.row(i), q, binning))
        .collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| nmi_of_bins(&bins[i], &bins[j]))
        .collect::<Result<_>>()?;
    let mut s = DMatrix::zeros(n, n);
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        s[(i, j)] = v;
        s[(j, i)] = v;
    }
    SimilarityMatrix::new(returns.stocks().to_vec(), s)
}
