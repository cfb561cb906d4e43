//! Partition agreement (adjusted Rand index) and sector-based scores.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::clustering::Partition;
use crate::error::{Error, Result};
use crate::graph::Clique;

/// Cross-tabulation of two partitions of the same vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
    rows: Vec<u64>,
    cols: Vec<u64>,
    total: u64,
}

impl ContingencyTable {
    pub fn new(a: &Partition, b: &Partition) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::ShapeMismatch(format!(
                "partitions cover {} and {} elements",
                a.len(),
                b.len()
            )));
        }
        let mut counts = vec![vec![0u64; b.k()]; a.k()];
        let mut rows = vec![0u64; a.k()];
        let mut cols = vec![0u64; b.k()];
        for (&i, &j) in a.assignment().iter().zip(b.assignment()) {
            counts[i][j] += 1;
            rows[i] += 1;
            cols[j] += 1;
        }
        Ok(Self {
            counts,
            rows,
            cols,
            total: a.len() as u64,
        })
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i][j]
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.rows
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.cols
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

fn pairs(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

/// Hubert–Arabie adjusted Rand index, in `[-1, 1]` and `1` exactly when the
/// partitions agree up to relabeling.
///
/// When the chance-corrected denominator vanishes (both partitions a single
/// cluster, or both all singletons) the index is `1` for identical
/// partitions and `0` otherwise.
pub fn ari(a: &Partition, b: &Partition) -> Result<f64> {
    let t = ContingencyTable::new(a, b)?;
    let index: u64 = t.counts.iter().flatten().map(|&x| pairs(x)).sum();
    let sa: u64 = t.rows.iter().map(|&x| pairs(x)).sum();
    let sb: u64 = t.cols.iter().map(|&x| pairs(x)).sum();
    let all = pairs(t.total);
    let degenerate = || {
        if a == b {
            1.0
        } else {
            log::warn!("adjusted Rand index undefined for these partitions; reporting 0");
            0.0
        }
    };
    if all == 0 {
        return Ok(degenerate());
    }
    let expected = (sa as f64) * (sb as f64) / all as f64;
    let max = 0.5 * (sa + sb) as f64;
    let denom = max - expected;
    if denom == 0.0 {
        return Ok(degenerate());
    }
    Ok((index as f64 - expected) / denom)
}

/// Share of cliques whose members all belong to one sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Homogeneity {
    pub homogeneous: usize,
    pub total: usize,
    pub ratio: f64,
}

/// Fraction of `cliques` lying inside a single sector; `sectors[v]` labels
/// vertex `v`.
pub fn clique_homogeneity(cliques: &[Clique], sectors: &[String]) -> Result<Homogeneity> {
    if cliques.is_empty() {
        return Err(Error::NoCliques);
    }
    let mut homogeneous = 0;
    for clique in cliques {
        let mut labels = clique.members.iter().map(|&v| {
            sectors
                .get(v)
                .ok_or_else(|| Error::MissingSector(format!("vertex {v}")))
        });
        let first = labels.next().transpose()?;
        let mut same = true;
        for l in labels {
            same &= Some(l?) == first;
        }
        if same {
            homogeneous += 1;
        }
    }
    Ok(Homogeneity {
        homogeneous,
        total: cliques.len(),
        ratio: homogeneous as f64 / cliques.len() as f64,
    })
}

/// Most frequent sector in `cluster` and its share in percent; ties go to
/// the lexicographically smallest sector. Returns `None` for an empty cluster.
pub fn dominant_sector(cluster: &[usize], sectors: &[String]) -> Option<(String, f64)> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for &v in cluster {
        *counts.entry(sectors[v].as_str()).or_default() += 1;
    }
    let (name, count) = counts
        .into_iter()
        .fold(None, |best: Option<(&str, usize)>, (s, c)| match best {
            Some((_, bc)) if bc >= c => best,
            _ => Some((s, c)),
        })?;
    Some((
        name.to_string(),
        100.0 * count as f64 / cluster.len() as f64,
    ))
}

/// One scalar result in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub metric: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub numerator: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub denominator: Option<f64>,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

impl MetricRecord {
    pub fn new(metric: impl Into<String>, value: f64) -> Self {
        Self {
            metric: metric.into(),
            value,
            numerator: None,
            denominator: None,
            params: BTreeMap::new(),
        }
    }

    pub fn ratio(mut self, numerator: f64, denominator: f64) -> Self {
        self.numerator = Some(numerator);
        self.denominator = Some(denominator);
        self
    }

    pub fn param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}
