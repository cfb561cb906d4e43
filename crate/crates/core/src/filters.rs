//! Network filters over the complete NMI graph: proportional degree (PD)
//! and the planar maximally filtered graph (PMFG).
//!
//! Both filters scan the same edge list: pairs sorted by descending
//! similarity, ties broken lexicographically on the endpoints' ranks in the
//! descending stock-weight order (rank 0 = heaviest stock).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{is_planar_edges, Network};
use crate::infotheory::SimilarityMatrix;
use crate::numeric::round_half_up;

/// Row sums of the similarity matrix, excluding the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct StockWeights {
    w: Vec<f64>,
}

impl StockWeights {
    pub fn new(w: Vec<f64>) -> Self {
        Self { w }
    }

    pub fn values(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Vertex indices from heaviest to lightest; equal weights keep index order.
    pub fn descending_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.w.len()).collect();
        order.sort_by(|&a, &b| self.w[b].total_cmp(&self.w[a]));
        order
    }
}

pub fn stock_weights(sim: &SimilarityMatrix) -> StockWeights {
    let n = sim.n();
    StockWeights {
        w: (0..n)
            .map(|i| (0..n).filter(|&j| j != i).map(|j| sim.get(i, j)).sum())
            .collect(),
    }
}

/// Real-valued degree targets `d'_i = SW_i / sum(SW) * 2M`.
pub fn proportional_degrees(weights: &StockWeights, m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "edge count M must be at least 1".into(),
        ));
    }
    let total: f64 = weights.w.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::DegenerateSimilarity);
    }
    let two_m = 2.0 * m as f64;
    Ok(weights.w.iter().map(|&w| w / total * two_m).collect())
}

/// Cascade rounding: walk `order`, round the running total of `real` to the
/// nearest integer (halves up) and hand each vertex the increment. The
/// grand total is preserved. Input and output are indexed by vertex.
pub fn cascade_round(real: &[f64], order: &[usize]) -> Result<Vec<usize>> {
    if order.len() != real.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} budgets but an order of length {}",
            real.len(),
            order.len()
        )));
    }
    let mut out = vec![0usize; real.len()];
    let mut cumulative = 0.0;
    let mut assigned: i64 = 0;
    for (position, &v) in order.iter().enumerate() {
        cumulative += real[v];
        let d = round_half_up(cumulative) - assigned;
        if d < 0 {
            return Err(Error::NegativeDegree {
                position,
                degree: d,
            });
        }
        out[v] = d as usize;
        assigned += d;
    }
    Ok(out)
}

/// Per-vertex degree budgets for the PD filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeBudget {
    /// Effective real budgets `d'_i`; clipped vertices carry `n - 1`.
    pub real_budgets: Vec<f64>,
    /// Integer budgets `d_i`, summing to `2M`.
    pub int_budgets: Vec<usize>,
    /// Vertices from largest to smallest stock weight.
    pub order: Vec<usize>,
    /// Vertices whose budget was capped at `n - 1`.
    pub clipped: Vec<usize>,
}

/// Budgets for `m` edges.
///
/// A vertex cannot have more than `n - 1` neighbours, so any integer budget
/// above that is capped and the surplus is spread over the remaining
/// vertices by rerunning the proportional split and cascade rounding on them.
pub fn degree_budget(weights: &StockWeights, m: usize) -> Result<DegreeBudget> {
    let n = weights.len();
    let max_edges = n * n.saturating_sub(1) / 2;
    if m > max_edges {
        return Err(Error::InvalidArgument(format!(
            "M = {m} exceeds the {max_edges} edges of the complete graph"
        )));
    }
    let mut real = proportional_degrees(weights, m)?;
    let order = weights.descending_order();
    let cap = n - 1;
    let mut clipped = vec![false; n];
    loop {
        let ints = cascade_round(&real, &order)?;
        let over: Vec<usize> = (0..n).filter(|&v| !clipped[v] && ints[v] > cap).collect();
        if over.is_empty() {
            return Ok(DegreeBudget {
                real_budgets: real,
                int_budgets: ints,
                order,
                clipped: (0..n).filter(|&v| clipped[v]).collect(),
            });
        }
        for v in over {
            clipped[v] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&v| !clipped[v]).collect();
        let n_clipped = n - free.len();
        let remaining = (2 * m - n_clipped * cap) as f64;
        let free_weight: f64 = free.iter().map(|&v| weights.w[v]).sum();
        for v in 0..n {
            real[v] = if clipped[v] {
                cap as f64
            } else if free_weight > 0.0 {
                weights.w[v] / free_weight * remaining
            } else {
                remaining / free.len() as f64
            };
        }
    }
}

/// Outcome of a PD build, including any unmet budget.
#[derive(Debug, Clone, PartialEq)]
pub struct PdNetwork {
    pub network: Network,
    pub budget: DegreeBudget,
    pub report: ShortfallReport,
}

/// Machine-readable account of how far a PD build fell short of `M` edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShortfallReport {
    pub target_edges: usize,
    pub realized_edges: usize,
    pub shortfall: usize,
    /// `(vertex, budget, realized degree)` for every vertex left below budget.
    pub unfilled: Vec<(usize, usize, usize)>,
}

/// All pairs `(i, j, s_ij)` with `i < j`, in filter scan order.
pub fn ranked_edges(sim: &SimilarityMatrix, order: &[usize]) -> Vec<(usize, usize, f64)> {
    let n = sim.n();
    let mut rank = vec![0usize; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let mut edges: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, sim.get(i, j)))
        .collect();
    let rank_key = |i: usize, j: usize| {
        let (a, b) = (rank[i], rank[j]);
        if a < b {
            (a, b)
        } else {
            (b, a)
        }
    };
    edges.sort_by(|x, y| {
        y.2.total_cmp(&x.2)
            .then_with(|| rank_key(x.0, x.1).cmp(&rank_key(y.0, y.1)))
    });
    edges
}

fn empty_network(sim: &SimilarityMatrix) -> Network {
    Network::new(sim.stocks().to_vec())
}

/// Proportional degree network with `m` edges as the target.
///
/// Scans pairs in ranked order and keeps `{i, j}` while both endpoints are
/// below their integer budgets. If the caps make `m` unreachable, fewer
/// edges are emitted and [`ShortfallReport`] says which vertices went unfilled.
pub fn build_pd(sim: &SimilarityMatrix, m: usize) -> Result<PdNetwork> {
    let n = sim.n();
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "PD needs at least 3 stocks, got {n}"
        )));
    }
    let weights = stock_weights(sim);
    let budget = degree_budget(&weights, m)?;
    let mut net = empty_network(sim);
    let mut degree = vec![0usize; n];
    let mut open = budget.int_budgets.iter().filter(|&&d| d > 0).count();
    for (i, j, s) in ranked_edges(sim, &budget.order) {
        if open < 2 {
            break;
        }
        if degree[i] < budget.int_budgets[i] && degree[j] < budget.int_budgets[j] {
            net.add_edge(i, j, s.clamp(0.0, 1.0))?;
            for v in [i, j] {
                degree[v] += 1;
                if degree[v] == budget.int_budgets[v] {
                    open -= 1;
                }
            }
        }
    }
    let realized = net.edge_count();
    let unfilled: Vec<(usize, usize, usize)> = (0..n)
        .filter(|&v| degree[v] < budget.int_budgets[v])
        .map(|v| (v, budget.int_budgets[v], degree[v]))
        .collect();
    if realized < m {
        log::info!("PD filter realized {realized} of {m} edges");
    }
    Ok(PdNetwork {
        network: net,
        budget,
        report: ShortfallReport {
            target_edges: m,
            realized_edges: realized,
            shortfall: m - realized,
            unfilled,
        },
    })
}

/// The default PD size, matching the PMFG edge count.
pub fn pmfg_edge_count(n: usize) -> usize {
    (3 * n).saturating_sub(6)
}

/// Planar maximally filtered graph: keep each ranked pair unless it breaks
/// planarity. Stops once the graph is maximal planar (`3n - 6` edges).
pub fn build_pmfg(sim: &SimilarityMatrix) -> Result<Network> {
    let n = sim.n();
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "PMFG needs at least 3 stocks, got {n}"
        )));
    }
    let order = stock_weights(sim).descending_order();
    let target = pmfg_edge_count(n);
    let mut net = empty_network(sim);
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(target);
    // Edges between two components skip the planarity test.
    let mut component: Vec<usize> = (0..n).collect();
    fn root(component: &mut [usize], mut v: usize) -> usize {
        while component[v] != v {
            component[v] = component[component[v]];
            v = component[v];
        }
        v
    }
    for (i, j, s) in ranked_edges(sim, &order) {
        if edges.len() == target {
            break;
        }
        let (ri, rj) = (root(&mut component, i), root(&mut component, j));
        edges.push((i, j));
        if ri != rj {
            component[ri] = rj;
        } else if !is_planar_edges(n, &edges) {
            edges.pop();
            continue;
        }
        net.add_edge(i, j, s.clamp(0.0, 1.0))?;
    }
    Ok(net)
}
