//! The individual studies. Each returns an [`ExperimentReport`] whose
//! records are ordered by parameter, then sample index, then series.

use nalgebra::DMatrix;
use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    derive_seed, sample_size, Annotation, ExperimentConfig, ExperimentReport, Reference, RunRecord,
};
use crate::clustering::{eigengaps, louvain, Partition, SpectralEmbedding};
use crate::error::{Error, Result};
use crate::filters::{build_pd, build_pmfg, pmfg_edge_count};
use crate::graph::{enumerate_m_cliques, maximal_cliques_min_size, Network};
use crate::infotheory::SimilarityMatrix;
use crate::metrics::{ari, clique_homogeneity};
use crate::numeric::{mean_variance, round_half_up};

const NETWORKS: [&str; 2] = ["pd", "pmfg"];

fn reference(quantity: &str, value: f64, note: &str) -> Reference {
    Reference {
        quantity: quantity.to_string(),
        value,
        note: note.to_string(),
    }
}

const ASX_NOTE: &str = "125 ASX 200 stocks, 2013-2016; not reproducible without that dataset";

/// Seed of the k-means stage for cluster count `k`. It depends only on
/// `(master, k)`, so every graph clustered at the same `k` shares it.
pub(crate) fn nsc_seed(master: u64, k: usize) -> u64 {
    derive_seed(master, "nsc", k as f64, 0)
}

/// Sorted random subset of `size` out of `n` indices.
fn sample_subset(n: usize, size: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = index::sample(&mut rng, n, size).into_vec();
    idx.sort_unstable();
    idx
}

/// `(sample index, seed, vertex subset)` for each sample at proportion `r`.
/// A proportion that keeps every stock yields the full set once.
fn subsets(
    experiment: &str,
    n: usize,
    r: f64,
    cfg: &ExperimentConfig,
) -> Result<Vec<(usize, u64, Vec<usize>)>> {
    let size = sample_size(r, n);
    if size < 10 {
        return Err(Error::InsufficientData(format!(
            "subset of {size} stocks (r = {r}, n = {n}) is below 10"
        )));
    }
    if size >= n {
        return Ok(vec![(0, 0, (0..n).collect())]);
    }
    Ok((0..cfg.samples)
        .map(|s| {
            let seed = derive_seed(cfg.seed, experiment, r, s as u64);
            (s, seed, sample_subset(n, size, seed))
        })
        .collect())
}

/// PD and PMFG on `sim` plus the PD edge shortfall; PD uses `edges` or
/// `3n - 6`.
fn build_both(sim: &SimilarityMatrix, edges: Option<usize>) -> Result<(Network, Network, usize)> {
    let m = edges.unwrap_or_else(|| pmfg_edge_count(sim.n()));
    let pd = build_pd(sim, m)?;
    Ok((pd.network, build_pmfg(sim)?, pd.report.shortfall))
}

/// Maximal-clique, 3-clique and 4-clique homogeneity of one network.
/// Clique families that are empty produce no record.
fn homogeneity_records(
    name: &str,
    net: &Network,
    sectors: &[String],
    cfg: &ExperimentConfig,
    (param, sample, seed): (f64, usize, u64),
) -> Result<Vec<RunRecord>> {
    let families = [
        (
            "maximal",
            maximal_cliques_min_size(net, cfg.clique_min_size),
        ),
        ("clique3", enumerate_m_cliques(net, 3)),
        ("clique4", enumerate_m_cliques(net, 4)),
    ];
    let mut out = Vec::new();
    for (kind, cliques) in families {
        if cliques.is_empty() {
            log::debug!("{name}: no {kind} cliques at r = {param}, sample {sample}");
            continue;
        }
        let h = clique_homogeneity(&cliques, sectors)?;
        out.push(
            RunRecord::new(
                &format!("{name}.{kind}"),
                param,
                param,
                sample,
                seed,
                h.ratio,
            )
            .ratio(h.homogeneous, h.total),
        );
    }
    Ok(out)
}

/// Clique homogeneity of PD and PMFG on random stock subsets, one series
/// per network and clique family (`pd.maximal`, `pmfg.clique3`, ...) plus
/// the PD edge shortfall (`pd.shortfall`). Proportion 1 is the full-data
/// comparison.
pub fn subset_homogeneity(
    sim: &SimilarityMatrix,
    sectors: &[String],
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    const NAME: &str = "subset_homogeneity";
    if sectors.len() != sim.n() {
        return Err(Error::ShapeMismatch(format!(
            "{} sector labels for {} stocks",
            sectors.len(),
            sim.n()
        )));
    }
    let mut jobs = Vec::new();
    for &r in &cfg.proportions {
        for (s, seed, subset) in subsets(NAME, sim.n(), r, cfg)? {
            jobs.push((r, s, seed, subset));
        }
    }
    let full_edges = cfg.pd_edges;
    let per_job: Vec<Vec<RunRecord>> = jobs
        .par_iter()
        .map(|(r, s, seed, subset)| {
            let full = subset.len() == sim.n();
            let sub = sim.restrict(subset);
            let labels: Vec<String> = subset.iter().map(|&i| sectors[i].clone()).collect();
            let (pd, pmfg, shortfall) = build_both(&sub, if full { full_edges } else { None })?;
            let mut out = vec![RunRecord::new(
                "pd.shortfall",
                *r,
                *r,
                *s,
                *seed,
                shortfall as f64,
            )];
            for (name, net) in NETWORKS.iter().zip([&pd, &pmfg]) {
                out.extend(homogeneity_records(
                    name,
                    net,
                    &labels,
                    cfg,
                    (*r, *s, *seed),
                )?);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut report = ExperimentReport::new(NAME, cfg.seed, per_job.into_iter().flatten().collect());
    report.references = vec![
        reference("pd.maximal", 47.0 / 87.0, ASX_NOTE),
        reference("pmfg.maximal", 43.0 / 122.0, ASX_NOTE),
        reference("pd.clique3", 178.0 / 236.0, ASX_NOTE),
        reference("pmfg.clique3", 152.0 / 367.0, ASX_NOTE),
        reference("pd.clique4", 91.0 / 101.0, ASX_NOTE),
        reference("pmfg.clique4", 43.0 / 122.0, ASX_NOTE),
    ];
    Ok(report)
}

/// Louvain on both networks (NMI edge weights) for `cfg.louvain_orders`
/// random vertex orders, scored by ARI against the sector partition
/// (`pd.sectors`) and against Louvain on the complete similarity matrix
/// in index order (`pd.complete`). `pd.clusters` counts communities.
pub fn louvain_ari_study(
    sim: &SimilarityMatrix,
    pd: &Network,
    pmfg: &Network,
    sectors: &[String],
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    const NAME: &str = "louvain_ari";
    let n = sim.n();
    if pd.n() != n || pmfg.n() != n || sectors.len() != n {
        return Err(Error::ShapeMismatch(
            "networks, sectors and similarity matrix disagree in size".into(),
        ));
    }
    let truth = Partition::from_labels(sectors);
    let identity: Vec<usize> = (0..n).collect();
    let complete = louvain(sim.matrix(), &identity)?;
    let weights = [pd.weighted_adjacency(), pmfg.weighted_adjacency()];

    let per_order: Vec<Vec<RunRecord>> = (0..cfg.louvain_orders)
        .into_par_iter()
        .map(|o| {
            let seed = derive_seed(cfg.seed, NAME, 0.0, o as u64);
            let mut order = identity.clone();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let mut out = Vec::new();
            for (name, w) in NETWORKS.iter().zip(&weights) {
                let p = louvain(w, &order)?;
                out.push(RunRecord::new(
                    &format!("{name}.sectors"),
                    0.0,
                    0.0,
                    o,
                    seed,
                    ari(&p, &truth)?,
                ));
                out.push(RunRecord::new(
                    &format!("{name}.complete"),
                    0.0,
                    0.0,
                    o,
                    seed,
                    ari(&p, &complete)?,
                ));
                out.push(RunRecord::new(
                    &format!("{name}.clusters"),
                    0.0,
                    0.0,
                    o,
                    seed,
                    p.k() as f64,
                ));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut records: Vec<RunRecord> = per_order.into_iter().flatten().collect();
    records.push(RunRecord::new(
        "complete.sectors",
        0.0,
        0.0,
        0,
        0,
        ari(&complete, &truth)?,
    ));
    records.push(RunRecord::new(
        "complete.clusters",
        0.0,
        0.0,
        0,
        0,
        complete.k() as f64,
    ));
    let mut report = ExperimentReport::new(NAME, cfg.seed, records);
    report.references = vec![
        reference("pd.sectors", 0.31, ASX_NOTE),
        reference("pmfg.sectors", 0.26, ASX_NOTE),
        reference("pd.complete", 0.40, "single vertex order; ASX data"),
        reference("pmfg.complete", 0.36, "single vertex order; ASX data"),
        reference("complete.clusters", 4.0, ASX_NOTE),
    ];
    Ok(report)
}

/// Up to `count` cluster counts in `[lo, hi]` with the largest eigengaps,
/// largest first (smaller `k` first on ties).
fn top_gaps(values: &[f64], lo: usize, hi: usize, count: usize) -> Vec<(usize, f64)> {
    let mut gaps: Vec<(usize, f64)> = eigengaps(values)
        .into_iter()
        .filter(|(k, _)| (lo..=hi).contains(k))
        .collect();
    gaps.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    gaps.truncate(count);
    gaps
}

/// Binary adjacency of `net`, the NSC input for filtered networks.
fn embed_network(net: &Network) -> Result<SpectralEmbedding> {
    SpectralEmbedding::new(&net.binary_adjacency())
}

/// NSC on the complete similarity matrix (`C_K`) and on the binary PD and
/// PMFG adjacencies for each k, scored by ARI against `C_K`
/// (`pd.vs_complete`) and, given sectors, against the sector partition
/// (`pd.vs_sectors`, `complete.vs_sectors`). The three largest eigengaps of
/// the complete spectrum at `k >= k_min` are annotated and always swept.
pub fn nsc_ari_sweep(
    sim: &SimilarityMatrix,
    pd: &Network,
    pmfg: &Network,
    sectors: Option<&[String]>,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    const NAME: &str = "nsc_ari_sweep";
    let n = sim.n();
    let complete = SpectralEmbedding::new(sim.matrix())?;
    let nets = [embed_network(pd)?, embed_network(pmfg)?];
    let truth = sectors.map(Partition::from_labels);

    let mut annotations = Vec::new();
    let mut ks: Vec<usize> = cfg.k_range(n).collect();
    let mut eigen_records = Vec::new();
    if let Some(spec) = complete.spectrum() {
        let values = spec.values();
        for (i, &v) in values.iter().enumerate() {
            eigen_records.push(RunRecord::new(
                "complete.eigenvalue",
                0.0,
                (i + 1) as f64,
                0,
                0,
                v,
            ));
        }
        let hi = cfg
            .eigengap_k_max
            .unwrap_or(n - 1)
            .min(values.len().saturating_sub(1));
        for (k, gap) in top_gaps(values, cfg.k_min, hi, 3) {
            annotations.push(Annotation {
                label: "eigengap".into(),
                x: k as f64,
                value: gap,
            });
            if k < n {
                ks.push(k);
            }
        }
    }
    ks.sort_unstable();
    ks.dedup();

    let per_k: Vec<Vec<RunRecord>> = ks
        .par_iter()
        .map(|&k| {
            let seed = nsc_seed(cfg.seed, k);
            let x = k as f64;
            let ck = complete.cluster(k, seed)?;
            let mut out = Vec::new();
            let parts = [nets[0].cluster(k, seed)?, nets[1].cluster(k, seed)?];
            for (name, p) in NETWORKS.iter().zip(&parts) {
                out.push(RunRecord::new(
                    &format!("{name}.vs_complete"),
                    0.0,
                    x,
                    0,
                    seed,
                    ari(p, &ck)?,
                ));
            }
            if let Some(truth) = &truth {
                for (name, p) in NETWORKS.iter().zip(&parts) {
                    out.push(RunRecord::new(
                        &format!("{name}.vs_sectors"),
                        0.0,
                        x,
                        0,
                        seed,
                        ari(p, truth)?,
                    ));
                }
                out.push(RunRecord::new(
                    "complete.vs_sectors",
                    0.0,
                    x,
                    0,
                    seed,
                    ari(&ck, truth)?,
                ));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut records: Vec<RunRecord> = per_k.into_iter().flatten().collect();
    records.extend(eigen_records);
    let mut report = ExperimentReport::new(NAME, cfg.seed, records);
    report.annotations = annotations;
    report.references = vec![
        reference("eigengap(4,5)", 0.74, ASX_NOTE),
        reference("eigengap(10,11)", 0.35, ASX_NOTE),
        reference("eigengap(11,12)", 0.16, ASX_NOTE),
    ];
    let table = [
        (5, 0.195, 0.0585, 0.121),
        (6, 0.197, 0.0921, 0.124),
        (7, 0.195, 0.069, 0.229),
        (8, 0.236, 0.1665, 0.27),
        (9, 0.339, 0.1557, 0.352),
        (10, 0.242, 0.1015, 0.376),
        (11, 0.274, 0.0833, 0.29),
        (12, 0.279, 0.0799, 0.33),
    ];
    for (k, p, q, c) in table {
        report
            .references
            .push(reference(&format!("pd.vs_sectors@k={k}"), p, ASX_NOTE));
        report
            .references
            .push(reference(&format!("pmfg.vs_sectors@k={k}"), q, ASX_NOTE));
        report.references.push(reference(
            &format!("complete.vs_sectors@k={k}"),
            c,
            ASX_NOTE,
        ));
    }
    Ok(report)
}

/// NSC agreement with `C_K` on random stock subsets: for each proportion
/// and sample, PD and PMFG are rebuilt on the subset and compared with NSC
/// of the restricted similarity matrix at every k. Records carry the
/// proportion as `param` and k as `x`.
pub fn subset_ari_study(
    sim: &SimilarityMatrix,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    const NAME: &str = "subset_ari";
    let mut jobs = Vec::new();
    for &r in &cfg.proportions {
        for (s, seed, subset) in subsets(NAME, sim.n(), r, cfg)? {
            jobs.push((r, s, seed, subset));
        }
    }
    let per_job: Vec<Vec<RunRecord>> = jobs
        .par_iter()
        .map(|(r, s, seed, subset)| {
            let full = subset.len() == sim.n();
            let sub = sim.restrict(subset);
            let (pd, pmfg, _) = build_both(&sub, if full { cfg.pd_edges } else { None })?;
            let complete = SpectralEmbedding::new(sub.matrix())?;
            let nets = [embed_network(&pd)?, embed_network(&pmfg)?];
            let mut out = Vec::new();
            for k in cfg.k_range(sub.n()) {
                let k_seed = nsc_seed(cfg.seed, k);
                let ck = complete.cluster(k, k_seed)?;
                for (name, emb) in NETWORKS.iter().zip(&nets) {
                    let value = ari(&emb.cluster(k, k_seed)?, &ck)?;
                    out.push(RunRecord::new(
                        &format!("{name}.vs_complete"),
                        *r,
                        k as f64,
                        *s,
                        *seed,
                        value,
                    ));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(ExperimentReport::new(
        NAME,
        cfg.seed,
        per_job.into_iter().flatten().collect(),
    ))
}

/// Binary adjacency of `net` with `remove` uniformly chosen edges deleted.
fn thinned_adjacency(net: &Network, remove: usize, seed: u64) -> DMatrix<f64> {
    let edges: Vec<(usize, usize, f64)> = net.edges().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drop = vec![false; edges.len()];
    for i in index::sample(&mut rng, edges.len(), remove) {
        drop[i] = true;
    }
    let mut m = DMatrix::zeros(net.n(), net.n());
    for ((u, v, _), gone) in edges.into_iter().zip(drop) {
        if !gone {
            m[(u, v)] = 1.0;
            m[(v, u)] = 1.0;
        }
    }
    m
}

/// NSC agreement with `C_K` after deleting `round(f |E|)` random edges.
/// Series `pd` and `pmfg` carry the fraction as `param` (0 for the intact
/// network) and k as `x`; `pd.state_variance` holds, per k, the variance of
/// the mean ARI across the intact and thinned states.
pub fn edge_removal_robustness(
    sim: &SimilarityMatrix,
    pd: &Network,
    pmfg: &Network,
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    const NAME: &str = "edge_removal";
    let n = sim.n();
    let complete = SpectralEmbedding::new(sim.matrix())?;
    let ks: Vec<usize> = cfg.k_range(n).collect();
    let reference_parts: Vec<Partition> = ks
        .iter()
        .map(|&k| complete.cluster(k, nsc_seed(cfg.seed, k)))
        .collect::<Result<_>>()?;
    let sweep = |name: &str, emb: &SpectralEmbedding, param: f64, sample: usize, seed: u64| {
        ks.iter()
            .zip(&reference_parts)
            .map(|(&k, ck)| {
                let p = emb.cluster(k, nsc_seed(cfg.seed, k))?;
                Ok(RunRecord::new(
                    name,
                    param,
                    k as f64,
                    sample,
                    seed,
                    ari(&p, ck)?,
                ))
            })
            .collect::<Result<Vec<_>>>()
    };

    let networks = [pd, pmfg];
    let mut records = Vec::new();
    for (name, net) in NETWORKS.iter().zip(networks) {
        records.extend(sweep(name, &embed_network(net)?, 0.0, 0, 0)?);
    }
    for &f in &cfg.removal_fractions {
        for (name, net) in NETWORKS.iter().zip(networks) {
            let e = net.edge_count();
            let remove = round_half_up(f * e as f64) as usize;
            if remove >= e {
                return Err(Error::InvalidArgument(format!(
                    "removing {remove} of {e} {name} edges leaves nothing"
                )));
            }
            let experiment = format!("{NAME}/{name}");
            let per_sample: Vec<Vec<RunRecord>> = (0..cfg.removal_samples)
                .into_par_iter()
                .map(|s| {
                    let seed = derive_seed(cfg.seed, &experiment, f, s as u64);
                    let emb = SpectralEmbedding::new(&thinned_adjacency(net, remove, seed))?;
                    sweep(name, &emb, f, s, seed)
                })
                .collect::<Result<_>>()?;
            records.extend(per_sample.into_iter().flatten());
        }
    }

    let means = ExperimentReport::new(NAME, cfg.seed, records.clone());
    for name in NETWORKS {
        for &k in &ks {
            let state_means: Vec<f64> = std::iter::once(0.0)
                .chain(cfg.removal_fractions.iter().copied())
                .filter_map(|f| means.find(name, f, k as f64).map(|a| a.mean))
                .collect();
            let (_, var) = mean_variance(&state_means).expect("intact state present");
            records.push(RunRecord::new(
                &format!("{name}.state_variance"),
                0.0,
                k as f64,
                0,
                0,
                var,
            ));
        }
    }
    Ok(ExperimentReport::new(NAME, cfg.seed, records))
}
