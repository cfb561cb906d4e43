use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Network;

/// Complete vertex subset, members sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Clique {
    pub members: Vec<usize>,
    pub maximal: bool,
}

impl Clique {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Direct all-pairs adjacency check against `network`.
    pub fn is_complete_in(&self, network: &Network) -> bool {
        self.members.iter().enumerate().all(|(a, &u)| {
            self.members[a + 1..]
                .iter()
                .all(|&v| network.has_edge(u, v))
        })
    }
}

/// All maximal cliques, each sorted, the list sorted lexicographically.
///
/// Bron-Kerbosch with Tomita pivoting. Isolated vertices appear as
/// singletons.
pub fn maximal_cliques(network: &Network) -> Vec<Clique> {
    let mut out = Vec::new();
    let mut r = Vec::new();
    let p: BTreeSet<usize> = (0..network.n()).collect();
    bron_kerbosch(network, &mut r, p, BTreeSet::new(), &mut out);
    let mut cliques: Vec<Clique> = out
        .into_iter()
        .map(|mut members| {
            members.sort_unstable();
            Clique {
                members,
                maximal: true,
            }
        })
        .collect();
    cliques.sort();
    cliques
}

/// Maximal cliques with at least `min_size` members.
pub fn maximal_cliques_min_size(network: &Network, min_size: usize) -> Vec<Clique> {
    maximal_cliques(network)
        .into_iter()
        .filter(|c| c.len() >= min_size)
        .collect()
}

fn bron_kerbosch(
    g: &Network,
    r: &mut Vec<usize>,
    mut p: BTreeSet<usize>,
    mut x: BTreeSet<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() {
        if x.is_empty() {
            out.push(r.clone());
        }
        return;
    }
    // pivot maximizing |P ∩ N(u)|, lowest index on ties
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by(|&a, &b| {
            let ca = g.neighbor_set(a).intersection(&p).count();
            let cb = g.neighbor_set(b).intersection(&p).count();
            ca.cmp(&cb).then(b.cmp(&a))
        })
        .expect("p is non-empty");
    let candidates: Vec<usize> = p
        .iter()
        .copied()
        .filter(|v| !g.neighbor_set(pivot).contains(v))
        .collect();
    for v in candidates {
        let nv = g.neighbor_set(v);
        r.push(v);
        bron_kerbosch(
            g,
            r,
            p.intersection(nv).copied().collect(),
            x.intersection(nv).copied().collect(),
            out,
        );
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
}

/// Every complete subset of exactly `m` vertices (not necessarily maximal),
/// in lexicographic order. The `maximal` flag is set on those that are also
/// maximal cliques.
pub fn enumerate_m_cliques(network: &Network, m: usize) -> Vec<Clique> {
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    let mut current = Vec::with_capacity(m);
    for v in 0..network.n() {
        current.push(v);
        let cand: Vec<usize> = network.neighbor_set(v).range(v + 1..).copied().collect();
        extend(network, m, &mut current, &cand, &mut out);
        current.pop();
    }
    out
}

fn extend(g: &Network, m: usize, current: &mut Vec<usize>, cand: &[usize], out: &mut Vec<Clique>) {
    if current.len() == m {
        let maximal =
            (0..g.n()).all(|w| current.contains(&w) || !current.iter().all(|&u| g.has_edge(u, w)));
        out.push(Clique {
            members: current.clone(),
            maximal,
        });
        return;
    }
    for (k, &v) in cand.iter().enumerate() {
        if cand.len() - k < m - current.len() {
            break;
        }
        let nv = g.neighbor_set(v);
        let next: Vec<usize> = cand[k + 1..]
            .iter()
            .copied()
            .filter(|w| nv.contains(w))
            .collect();
        current.push(v);
        extend(g, m, current, &next, out);
        current.pop();
    }
}
