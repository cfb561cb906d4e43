//! End-to-end run: prices to similarity, networks, studies and files.
//!
//! Output layout under the target directory:
//!
//! ```text
//! similarity.csv            NMI matrix
//! vertices.csv              index,stock,sector
//! network_pd.csv            u,v,weight
//! network_pmfg.csv          u,v,weight
//! partitions/*.csv          stock,cluster
//! reports/<study>.json      records, aggregates, references
//! reports/pd_build.json     degree budget and shortfall
//! reports/summary.json      headline metrics
//! figures/<study>.csv       series,param,x,y,variance,count
//! ```

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::studies::nsc_seed;
use super::{
    edge_removal_robustness, louvain_ari_study, nsc_ari_sweep, subset_ari_study,
    subset_homogeneity, ExperimentConfig, ExperimentReport,
};
use crate::clustering::{eigengap_k, louvain, Partition, SpectralEmbedding};
use crate::error::{Error, Result};
use crate::filters::{build_pd, build_pmfg, pmfg_edge_count, DegreeBudget, ShortfallReport};
use crate::graph::{enumerate_m_cliques, maximal_cliques_min_size, Network};
use crate::infotheory::{similarity_matrix_with, SimilarityMatrix};
use crate::ingest::{load_price_table, log_returns, PriceFormat, SectorTable};
use crate::metrics::{clique_homogeneity, MetricRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineInputs {
    pub prices: PathBuf,
    pub format: PriceFormat,
    pub sectors: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub similarity: SimilarityMatrix,
    pub pd: Network,
    pub pmfg: Network,
    pub summary: Vec<MetricRecord>,
    pub reports: Vec<ExperimentReport>,
}

#[derive(Serialize)]
struct PdBuild<'a> {
    target_edges: usize,
    budget: &'a DegreeBudget,
    shortfall: &'a ShortfallReport,
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn mkdir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Full-data homogeneity of one network as summary records.
fn homogeneity_summary(
    name: &str,
    net: &Network,
    sectors: &[String],
    min_size: usize,
) -> Result<Vec<MetricRecord>> {
    let mut out = Vec::new();
    for (kind, cliques) in [
        ("maximal", maximal_cliques_min_size(net, min_size)),
        ("clique3", enumerate_m_cliques(net, 3)),
        ("clique4", enumerate_m_cliques(net, 4)),
    ] {
        if cliques.is_empty() {
            continue;
        }
        let h = clique_homogeneity(&cliques, sectors)?;
        out.push(
            MetricRecord::new(format!("homogeneity.{kind}"), h.ratio)
                .ratio(h.homogeneous as f64, h.total as f64)
                .param("network", name),
        );
    }
    Ok(out)
}

/// Runs ingest, similarity, both filters and every study enabled in `cfg`,
/// writing the results under `out`.
///
/// Studies that score against sectors need `inputs.sectors`; without it the
/// run fails with a configuration error before any work is done.
pub fn run_pipeline(
    cfg: &ExperimentConfig,
    inputs: &PipelineInputs,
    out: &Path,
) -> Result<PipelineOutput> {
    cfg.validate()?;
    let sector_studies: Vec<&str> = ["subset_homogeneity", "louvain_ari"]
        .into_iter()
        .filter(|s| cfg.runs(s))
        .collect();
    if inputs.sectors.is_none() && !sector_studies.is_empty() {
        return Err(Error::Config(format!(
            "studies {} need a sector file",
            sector_studies.join(", ")
        )));
    }

    let load = load_price_table(&inputs.prices, inputs.format)?;
    let prices = load.prices;
    let sectors = match &inputs.sectors {
        Some(path) => Some(SectorTable::load(path)?.labels_for(prices.stocks())?),
        None => None,
    };
    let returns = log_returns(&prices);
    let sim = similarity_matrix_with(&returns, cfg.q, cfg.binning)?;
    let n = sim.n();
    let m = cfg.pd_edges.unwrap_or_else(|| pmfg_edge_count(n));
    let pd_build = build_pd(&sim, m)?;
    if pd_build.report.shortfall > 0 {
        log::warn!(
            "PD filter realized {} of {m} edges",
            pd_build.report.realized_edges
        );
    }
    let mut pd = pd_build.network.clone();
    let mut pmfg = build_pmfg(&sim)?;
    if let Some(labels) = &sectors {
        pd.set_sectors(labels.clone())?;
        pmfg.set_sectors(labels.clone())?;
    }

    for dir in ["partitions", "reports", "figures"] {
        mkdir(&out.join(dir))?;
    }
    sim.write_csv(&out.join("similarity.csv"))?;
    pd.write_vertices(&out.join("vertices.csv"))?;
    pd.write_edges(&out.join("network_pd.csv"))?;
    pmfg.write_edges(&out.join("network_pmfg.csv"))?;
    write(
        &out.join("reports/pd_build.json"),
        &serde_json::to_string_pretty(&PdBuild {
            target_edges: m,
            budget: &pd_build.budget,
            shortfall: &pd_build.report,
        })?,
    )?;

    let mut summary = vec![
        MetricRecord::new("stocks", n as f64),
        MetricRecord::new("returns", returns.n_returns() as f64),
        MetricRecord::new("dropped_stocks", load.dropped.len() as f64),
        MetricRecord::new("edges", pd.edge_count() as f64).param("network", "pd"),
        MetricRecord::new("edges", pmfg.edge_count() as f64).param("network", "pmfg"),
        MetricRecord::new("shortfall", pd_build.report.shortfall as f64).param("network", "pd"),
    ];
    if let Some(labels) = &sectors {
        for (name, net) in [("pd", &pd), ("pmfg", &pmfg)] {
            summary.extend(homogeneity_summary(name, net, labels, cfg.clique_min_size)?);
        }
    }

    let mut reports = Vec::new();
    if cfg.runs("subset_homogeneity") {
        let labels = sectors.as_deref().expect("checked above");
        reports.push(subset_homogeneity(&sim, labels, cfg)?);
    }
    if cfg.runs("louvain_ari") {
        let labels = sectors.as_deref().expect("checked above");
        let report = louvain_ari_study(&sim, &pd, &pmfg, labels, cfg)?;
        for series in ["pd.sectors", "pmfg.sectors", "pd.complete", "pmfg.complete"] {
            let (network, against) = series.split_once('.').expect("dotted name");
            let mean = report.find(series, 0.0, 0.0).map_or(f64::NAN, |a| a.mean);
            summary.push(
                MetricRecord::new("louvain_mean_ari", mean)
                    .param("network", network)
                    .param("against", against),
            );
        }
        let identity: Vec<usize> = (0..n).collect();
        for (name, w) in [
            ("complete", sim.matrix().clone()),
            ("pd", pd.weighted_adjacency()),
            ("pmfg", pmfg.weighted_adjacency()),
        ] {
            louvain(&w, &identity)?.write_csv(
                sim.stocks(),
                &out.join(format!("partitions/louvain_{name}.csv")),
            )?;
        }
        reports.push(report);
    }
    if cfg.runs("nsc_ari_sweep") {
        reports.push(nsc_ari_sweep(&sim, &pd, &pmfg, sectors.as_deref(), cfg)?);
        let complete = SpectralEmbedding::new(sim.matrix())?;
        if let Some(spec) = complete.spectrum() {
            let hi = cfg.eigengap_k_max.unwrap_or(n - 1).min(spec.len() - 1);
            if let Ok(k) = eigengap_k(spec.values(), cfg.k_min, hi) {
                summary.push(MetricRecord::new("eigengap_k", k as f64));
                let seed = nsc_seed(cfg.seed, k);
                let parts: [(&str, Partition); 3] = [
                    ("complete", complete.cluster(k, seed)?),
                    (
                        "pd",
                        SpectralEmbedding::new(&pd.binary_adjacency())?.cluster(k, seed)?,
                    ),
                    (
                        "pmfg",
                        SpectralEmbedding::new(&pmfg.binary_adjacency())?.cluster(k, seed)?,
                    ),
                ];
                for (name, p) in parts {
                    p.write_csv(
                        sim.stocks(),
                        &out.join(format!("partitions/nsc_{name}_k{k}.csv")),
                    )?;
                }
            }
        }
    }
    if cfg.runs("subset_ari") {
        reports.push(subset_ari_study(&sim, cfg)?);
    }
    if cfg.runs("edge_removal") {
        reports.push(edge_removal_robustness(&sim, &pd, &pmfg, cfg)?);
    }

    for report in &reports {
        write(
            &out.join(format!("reports/{}.json", report.experiment)),
            &report.to_json()?,
        )?;
        write(
            &out.join(format!("figures/{}.csv", report.experiment)),
            &report.figure_csv(),
        )?;
    }
    write(
        &out.join("reports/summary.json"),
        &serde_json::to_string_pretty(&summary)?,
    )?;
    Ok(PipelineOutput {
        similarity: sim,
        pd,
        pmfg,
        summary,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{synth_market, SynthConfig};

    fn fixture(dir: &Path) -> PipelineInputs {
        let m = synth_market(&SynthConfig {
            n: 20,
            sectors: 4,
            days: 300,
            seed: 3,
            ..SynthConfig::default()
        })
        .unwrap();
        let prices = dir.join("prices.csv");
        let sectors = dir.join("sectors.csv");
        m.prices.write_wide(&prices).unwrap();
        m.sectors.write(&sectors).unwrap();
        PipelineInputs {
            prices,
            format: PriceFormat::Wide,
            sectors: Some(sectors),
        }
    }

    #[test]
    fn missing_sectors_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let inputs = PipelineInputs {
            sectors: None,
            ..fixture(dir.path())
        };
        let err = run_pipeline(
            &ExperimentConfig::default(),
            &inputs,
            &dir.path().join("out"),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");

        let cfg = ExperimentConfig {
            studies: vec!["nsc_ari_sweep".into()],
            ..ExperimentConfig::default()
        };
        run_pipeline(&cfg, &inputs, &dir.path().join("out")).unwrap();
    }

    #[test]
    fn writes_layout() {
        let dir = tempfile::tempdir().unwrap();
        let inputs = fixture(dir.path());
        let cfg = ExperimentConfig {
            samples: 2,
            louvain_orders: 3,
            removal_samples: 2,
            k_max: Some(6),
            ..ExperimentConfig::default()
        };
        let out = dir.path().join("out");
        let result = run_pipeline(&cfg, &inputs, &out).unwrap();
        assert_eq!(result.reports.len(), 5);
        for file in [
            "similarity.csv",
            "vertices.csv",
            "network_pd.csv",
            "network_pmfg.csv",
            "reports/summary.json",
            "reports/pd_build.json",
            "reports/edge_removal.json",
            "figures/subset_ari.csv",
            "partitions/louvain_pd.csv",
        ] {
            assert!(out.join(file).is_file(), "{file}");
        }
        let back = Network::read(&out.join("vertices.csv"), &out.join("network_pd.csv")).unwrap();
        assert_eq!(back, result.pd);
    }
}
