//! Seeded experiment protocols: clique homogeneity on random subsets,
//! Louvain and spectral clustering agreement, and robustness to edge
//! removal. Every study is a deterministic function of its inputs and the
//! master seed.

mod pipeline;
mod studies;
mod synth;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ingest::Binning;
use crate::numeric::{mean_variance, round_half_up};

pub use pipeline::{run_pipeline, PipelineInputs, PipelineOutput};
pub use studies::{
    edge_removal_robustness, louvain_ari_study, nsc_ari_sweep, subset_ari_study, subset_homogeneity,
};
pub use synth::{synth_market, SynthConfig, SynthMarket};

/// Study names accepted in [`ExperimentConfig::studies`].
pub const STUDIES: [&str; 5] = [
    "subset_homogeneity",
    "louvain_ari",
    "nsc_ari_sweep",
    "subset_ari",
    "edge_removal",
];

/// Experiment settings, readable from a TOML key-value file. Missing keys
/// take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Bins per return series.
    pub q: usize,
    pub binning: Binning,
    /// PD edge count on the full data; `None` means `3n - 6`. Subsets
    /// always use `3n' - 6`.
    pub pd_edges: Option<usize>,
    /// Subset proportions `r`.
    pub proportions: Vec<f64>,
    /// Random subsets per proportion.
    pub samples: usize,
    /// Random vertex orders for Louvain.
    pub louvain_orders: usize,
    /// Edge-removal fractions.
    pub removal_fractions: Vec<f64>,
    /// Random edge sets per removal fraction.
    pub removal_samples: usize,
    /// Smallest cluster count in NSC sweeps.
    pub k_min: usize,
    /// Largest cluster count in NSC sweeps; `None` means `min(20, n - 1)`.
    pub k_max: Option<usize>,
    /// Upper end of the eigengap scan; `None` means `n - 1`.
    pub eigengap_k_max: Option<usize>,
    /// Smallest maximal clique counted in homogeneity.
    pub clique_min_size: usize,
    /// Studies run by the pipeline.
    pub studies: Vec<String>,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            q: 20,
            binning: Binning::Quantile,
            pd_edges: None,
            proportions: vec![4.0 / 5.0, 3.0 / 4.0, 2.0 / 3.0, 1.0 / 2.0],
            samples: 10,
            louvain_orders: 100,
            removal_fractions: vec![0.2, 0.3, 0.4],
            removal_samples: 100,
            k_min: 4,
            k_max: None,
            eigengap_k_max: None,
            clique_min_size: 3,
            studies: STUDIES.iter().map(|s| s.to_string()).collect(),
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.q < 2 {
            return bad(format!("q = {} must be at least 2", self.q));
        }
        for (name, count) in [
            ("samples", self.samples),
            ("louvain_orders", self.louvain_orders),
            ("removal_samples", self.removal_samples),
        ] {
            if count == 0 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        if let Some(r) = self.proportions.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
            return bad(format!("proportion {r} outside (0, 1]"));
        }
        if let Some(f) = self
            .removal_fractions
            .iter()
            .find(|f| !(**f > 0.0 && **f < 1.0))
        {
            return bad(format!("removal fraction {f} outside (0, 1)"));
        }
        if self.k_min < 2 {
            return bad(format!("k_min = {} must be at least 2", self.k_min));
        }
        if self.k_max.is_some_and(|k| k < self.k_min) {
            return bad("k_max below k_min".into());
        }
        if self.clique_min_size < 2 {
            return bad("clique_min_size must be at least 2".into());
        }
        if let Some(s) = self.studies.iter().find(|s| !STUDIES.contains(&s.as_str())) {
            return bad(format!("unknown study `{s}`"));
        }
        Ok(())
    }

    pub fn runs(&self, study: &str) -> bool {
        self.studies.iter().any(|s| s == study)
    }

    /// Cluster counts swept for an `n`-vertex graph.
    pub fn k_range(&self, n: usize) -> std::ops::RangeInclusive<usize> {
        let hi = self.k_max.unwrap_or(20).min(n.saturating_sub(1));
        self.k_min..=hi
    }
}

/// Per-sample seed from `(master, experiment, parameter, index)`. Adding
/// samples or parameters never changes the seeds of existing ones.
pub fn derive_seed(master: u64, experiment: &str, param: f64, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update((experiment.len() as u64).to_le_bytes());
    h.update(experiment.as_bytes());
    h.update(param.to_bits().to_le_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Subset size `round(r * n)`, halves up.
pub fn sample_size(r: f64, n: usize) -> usize {
    round_half_up(r * n as f64).max(0) as usize
}

/// One measured value from one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub series: String,
    /// Outer parameter (subset proportion or removal fraction; 0 if unused).
    pub param: f64,
    /// Plot abscissa (cluster count, proportion, ...).
    pub x: f64,
    pub sample: usize,
    pub seed: u64,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub numerator: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub denominator: Option<f64>,
}

impl RunRecord {
    pub fn new(series: &str, param: f64, x: f64, sample: usize, seed: u64, value: f64) -> Self {
        Self {
            series: series.to_string(),
            param,
            x,
            sample,
            seed,
            value,
            numerator: None,
            denominator: None,
        }
    }

    pub fn ratio(mut self, numerator: usize, denominator: usize) -> Self {
        self.numerator = Some(numerator as f64);
        self.denominator = Some(denominator as f64);
        self
    }
}

/// Mean and population variance of one `(series, param, x)` group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub series: String,
    pub param: f64,
    pub x: f64,
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
}

/// Published value kept alongside a report for comparison only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub quantity: String,
    pub value: f64,
    pub note: String,
}

/// Point of interest attached to a report, such as an eigengap-selected k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub label: String,
    pub x: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub master_seed: u64,
    pub records: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
    #[serde(default)]
    pub annotations: Vec<Annotation>,
    #[serde(default)]
    pub references: Vec<Reference>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, master_seed: u64, records: Vec<RunRecord>) -> Self {
        let aggregates = aggregate(&records);
        Self {
            experiment: experiment.to_string(),
            master_seed,
            records,
            aggregates,
            annotations: Vec::new(),
            references: Vec::new(),
        }
    }

    pub fn find(&self, series: &str, param: f64, x: f64) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.series == series && a.param == param && a.x == x)
    }

    /// Aggregates of one series as `(param, x, mean)`.
    pub fn series(&self, series: &str) -> Vec<(f64, f64, f64)> {
        self.aggregates
            .iter()
            .filter(|a| a.series == series)
            .map(|a| (a.param, a.x, a.mean))
            .collect()
    }

    /// Plot-ready `series,param,x,y,variance,count` rows at six
    /// significant digits.
    pub fn figure_csv(&self) -> String {
        let mut out = String::from("series,param,x,y,variance,count\n");
        for a in &self.aggregates {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                a.series,
                sig6(a.param),
                sig6(a.x),
                sig6(a.mean),
                sig6(a.variance),
                a.count
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Six significant digits, without trailing zeros.
pub(crate) fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = 5 - x.abs().log10().floor() as i32;
    let s = if digits > 0 {
        format!("{:.*}", digits as usize, x)
    } else {
        let scale = 10f64.powi(-digits);
        format!("{}", (x / scale).round() * scale)
    };
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Groups records by `(series, param, x)` in first-appearance order and
/// reduces each group in record order.
pub fn aggregate(records: &[RunRecord]) -> Vec<Aggregate> {
    let mut keys: Vec<(String, u64, u64)> = Vec::new();
    let mut groups: BTreeMap<(String, u64, u64), Vec<f64>> = BTreeMap::new();
    for r in records {
        let key = (r.series.clone(), r.param.to_bits(), r.x.to_bits());
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                keys.push(key);
                Vec::new()
            })
            .push(r.value);
    }
    keys.into_iter()
        .map(|key| {
            let values = &groups[&key];
            let (mean, variance) = mean_variance(values).expect("non-empty group");
            Aggregate {
                series: key.0,
                param: f64::from_bits(key.1),
                x: f64::from_bits(key.2),
                count: values.len(),
                mean,
                variance,
            }
        })
        .collect()
}
