//! Independent oracles and fixtures shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use corrnet::SimilarityMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complete graph with i.i.d. uniform weights in (0, 1).
pub fn random_similarity(n: usize, seed: u64) -> SimilarityMatrix {
    let mut rng = rng(seed);
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let x: f64 = rng.random();
            s[(i, j)] = x;
            s[(j, i)] = x;
        }
    }
    SimilarityMatrix::new((0..n).map(|i| format!("V{i:03}")).collect(), s).unwrap()
}

/// Binary adjacency of a planted-partition graph and the planted labels.
pub fn planted_blocks(
    sizes: &[usize],
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> (DMatrix<f64>, Vec<usize>) {
    let labels: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect();
    let n = labels.len();
    let mut rng = rng(seed);
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if labels[i] == labels[j] { p_in } else { p_out };
            if rng.random_bool(p) {
                w[(i, j)] = 1.0;
                w[(j, i)] = 1.0;
            }
        }
    }
    (w, labels)
}

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

// ---------------------------------------------------------------------------
// Planarity: Demoucron, Malgrange and Pertuiset path embedding, run on each
// biconnected block.

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

/// Edge sets of the biconnected blocks (Hopcroft and Tarjan).
fn blocks(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    struct Dfs<'a> {
        adj: &'a [Vec<usize>],
        disc: Vec<usize>,
        low: Vec<usize>,
        time: usize,
        stack: Vec<(usize, usize)>,
        out: Vec<Vec<(usize, usize)>>,
    }
    impl Dfs<'_> {
        fn visit(&mut self, u: usize, parent: Option<usize>) {
            self.time += 1;
            self.disc[u] = self.time;
            self.low[u] = self.time;
            for &v in &self.adj[u] {
                if Some(v) == parent {
                    continue;
                }
                if self.disc[v] == 0 {
                    self.stack.push((u, v));
                    self.visit(v, Some(u));
                    self.low[u] = self.low[u].min(self.low[v]);
                    if self.low[v] >= self.disc[u] {
                        let mut block = Vec::new();
                        while let Some(e) = self.stack.pop() {
                            block.push(e);
                            if e == (u, v) {
                                break;
                            }
                        }
                        self.out.push(block);
                    }
                } else if self.disc[v] < self.disc[u] {
                    self.stack.push((u, v));
                    self.low[u] = self.low[u].min(self.disc[v]);
                }
            }
        }
    }
    let adj = adjacency(n, edges);
    let mut dfs = Dfs {
        adj: &adj,
        disc: vec![0; n],
        low: vec![0; n],
        time: 0,
        stack: Vec::new(),
        out: Vec::new(),
    };
    for v in 0..n {
        if dfs.disc[v] == 0 {
            dfs.visit(v, None);
        }
    }
    dfs.out
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Shortest path from `from` to `to` avoiding the direct edge between them.
fn cycle_through(adj: &[Vec<usize>], from: usize, to: usize) -> Vec<usize> {
    let mut prev = vec![usize::MAX; adj.len()];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if prev[v] != usize::MAX || (u == from && v == to) {
                continue;
            }
            prev[v] = u;
            queue.push_back(v);
        }
    }
    let mut path = vec![to];
    while *path.last().unwrap() != from {
        path.push(prev[*path.last().unwrap()]);
    }
    path.reverse();
    path
}

/// A fragment of the block relative to the embedded subgraph: its
/// attachment vertices and a way to draw one path through it.
struct Fragment {
    attachments: BTreeSet<usize>,
    /// Chord endpoints, or the internal vertices of a bridge component.
    chord: Option<(usize, usize)>,
    inner: Vec<usize>,
}

fn dmp_block(edges: &[(usize, usize)]) -> bool {
    let mut vertices: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    vertices.sort_unstable();
    vertices.dedup();
    let nv = vertices.len();
    if edges.len() <= 3 || nv < 5 {
        return true;
    }
    if edges.len() > 3 * nv - 6 {
        return false;
    }
    let index: HashMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let local: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (index[&u], index[&v])).collect();
    let adj = adjacency(nv, &local);

    let (a, b) = local[0];
    let cycle = cycle_through(&adj, a, b);
    let mut in_h = vec![false; nv];
    let mut h_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for w in cycle.windows(2) {
        h_edges.insert(key(w[0], w[1]));
    }
    h_edges.insert(key(a, b));
    for &v in &cycle {
        in_h[v] = true;
    }
    let mut faces: Vec<Vec<usize>> = vec![cycle.clone(), cycle];

    while h_edges.len() < local.len() {
        let mut fragments = Vec::new();
        for &(u, v) in &local {
            if in_h[u] && in_h[v] && !h_edges.contains(&key(u, v)) {
                fragments.push(Fragment {
                    attachments: BTreeSet::from([u, v]),
                    chord: Some((u, v)),
                    inner: Vec::new(),
                });
            }
        }
        let mut seen = vec![false; nv];
        for start in 0..nv {
            if in_h[start] || seen[start] {
                continue;
            }
            let mut inner = Vec::new();
            let mut attachments = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(u) = queue.pop_front() {
                inner.push(u);
                for &v in &adj[u] {
                    if in_h[v] {
                        attachments.insert(v);
                    } else if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            fragments.push(Fragment {
                attachments,
                chord: None,
                inner,
            });
        }

        let admissible = |frag: &Fragment| -> Vec<usize> {
            (0..faces.len())
                .filter(|&f| frag.attachments.iter().all(|v| faces[f].contains(v)))
                .collect()
        };
        let mut choice = None;
        for (i, frag) in fragments.iter().enumerate() {
            let fs = admissible(frag);
            match fs.len() {
                0 => return false,
                1 => {
                    choice = Some((i, fs[0]));
                    break;
                }
                _ => {
                    if choice.is_none() {
                        choice = Some((i, fs[0]));
                    }
                }
            }
        }
        let (fi, face) = choice.expect("a fragment remains while edges are missing");
        let frag = &fragments[fi];

        // path a, p1, ..., pr, b through the fragment between two attachments
        let path = match frag.chord {
            Some((u, v)) => vec![u, v],
            None => {
                let in_frag: BTreeSet<usize> = frag.inner.iter().copied().collect();
                let a = *frag.attachments.iter().next().unwrap();
                let c = *adj[a].iter().filter(|v| in_frag.contains(v)).min().unwrap();
                let mut prev = HashMap::from([(c, c)]);
                let mut queue = VecDeque::from([c]);
                let mut end = None;
                'search: while let Some(u) = queue.pop_front() {
                    for &v in &adj[u] {
                        if in_h[v] && v != a {
                            end = Some((u, v));
                            break 'search;
                        }
                    }
                    for &v in &adj[u] {
                        if in_frag.contains(&v) && !prev.contains_key(&v) {
                            prev.insert(v, u);
                            queue.push_back(v);
                        }
                    }
                }
                let (x, b) = end.expect("blocks give every bridge two attachments");
                let mut inner_path = vec![x];
                while *inner_path.last().unwrap() != c {
                    inner_path.push(prev[inner_path.last().unwrap()]);
                }
                inner_path.reverse();
                let mut path = vec![a];
                path.extend(inner_path);
                path.push(b);
                path
            }
        };

        let f = faces.swap_remove(face);
        let (a, b) = (path[0], *path.last().unwrap());
        let ia = f.iter().position(|&v| v == a).unwrap();
        let ib = f.iter().position(|&v| v == b).unwrap();
        let arc = |from: usize, to: usize| -> Vec<usize> {
            let mut out = vec![f[from]];
            let mut i = from;
            while i != to {
                i = (i + 1) % f.len();
                out.push(f[i]);
            }
            out
        };
        let interior = &path[1..path.len() - 1];
        let mut first = arc(ia, ib);
        first.extend(interior.iter().rev());
        let mut second = arc(ib, ia);
        second.extend(interior.iter());
        faces.push(first);
        faces.push(second);
        for w in path.windows(2) {
            h_edges.insert(key(w[0], w[1]));
        }
        for &v in interior {
            in_h[v] = true;
        }
    }
    true
}

/// Planarity by path embedding, block by block.
pub fn dmp_is_planar(n: usize, edges: &[(usize, usize)]) -> bool {
    blocks(n, edges).iter().all(|b| dmp_block(b))
}

// ---------------------------------------------------------------------------
// Information theory by direct summation.

pub fn entropy_direct(p: &[f64]) -> f64 {
    let mut h = 0.0;
    for &x in p {
        if x > 0.0 {
            h -= x * x.log2();
        }
    }
    h
}

/// `sum p(a,b) log2(p(a,b) / (p(a) p(b)))` over a row-major `q x q` table.
pub fn mi_direct(q: usize, joint: &[f64]) -> f64 {
    let row: Vec<f64> = (0..q)
        .map(|a| (0..q).map(|b| joint[a * q + b]).sum())
        .collect();
    let col: Vec<f64> = (0..q)
        .map(|b| (0..q).map(|a| joint[a * q + b]).sum())
        .collect();
    let mut i = 0.0;
    for a in 0..q {
        for b in 0..q {
            let p = joint[a * q + b];
            if p > 0.0 {
                i += p * (p / (row[a] * col[b])).log2();
            }
        }
    }
    i
}

// ---------------------------------------------------------------------------
// Partition comparisons.

/// ARI from counts of element pairs: `a` together in both, `b` only in
/// the first, `c` only in the second, `d` apart in both.
pub fn ari_pairs(x: &[usize], y: &[usize]) -> f64 {
    let (mut a, mut b, mut c, mut d) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            match (x[i] == x[j], y[i] == y[j]) {
                (true, true) => a += 1.0,
                (true, false) => b += 1.0,
                (false, true) => c += 1.0,
                (false, false) => d += 1.0,
            }
        }
    }
    let denom = (a + b) * (b + d) + (a + c) * (c + d);
    if denom == 0.0 {
        return if same_partition(x, y) { 1.0 } else { 0.0 };
    }
    2.0 * (a * d - b * c) / denom
}

pub fn same_partition(x: &[usize], y: &[usize]) -> bool {
    (0..x.len()).all(|i| (0..x.len()).all(|j| (x[i] == x[j]) == (y[i] == y[j])))
}

/// Every set partition of `0..n` as restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().max().map_or(0, |m| m + 1);
        for label in 0..=next {
            prefix.push(label);
            extend(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), n, &mut out);
    out
}

/// `1/(2m) sum_ij [w_ij - k_i k_j / (2m)] [c_i = c_j]`.
pub fn modularity_direct(w: &DMatrix<f64>, labels: &[usize]) -> f64 {
    let n = w.nrows();
    let k: Vec<f64> = (0..n).map(|i| w.row(i).sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += w[(i, j)] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}
