//! Left-right planarity test (Brandes' formulation of de Fraysseix and
//! Rosenstiehl's criterion). Only the boolean verdict is computed; no
//! embedding is built.

use super::Network;

type EdgeId = usize;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Interval {
    low: Option<EdgeId>,
    high: Option<EdgeId>,
}

impl Interval {
    fn single(e: EdgeId) -> Self {
        Self {
            low: Some(e),
            high: Some(e),
        }
    }

    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ConflictPair {
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }

    fn is_empty(&self) -> bool {
        self.left.is_empty() && self.right.is_empty()
    }
}

const UNSET: usize = usize::MAX;

struct LrState {
    adjacency: Vec<Vec<(usize, EdgeId)>>,
    target: Vec<usize>,
    source: Vec<usize>,
    oriented: Vec<bool>,
    height: Vec<usize>,
    parent_edge: Vec<Option<EdgeId>>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting_depth: Vec<usize>,
    ordered: Vec<Vec<EdgeId>>,
    reference: Vec<Option<EdgeId>>,
    lowpt_edge: Vec<EdgeId>,
    stack_bottom: Vec<usize>,
    stack: Vec<ConflictPair>,
}

impl LrState {
    fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let m = edges.len();
        let mut adjacency = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            adjacency[u].push((v, id));
            adjacency[v].push((u, id));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            adjacency,
            target: vec![UNSET; m],
            source: vec![UNSET; m],
            oriented: vec![false; m],
            height: vec![UNSET; n],
            parent_edge: vec![None; n],
            lowpt: vec![0; m],
            lowpt2: vec![0; m],
            nesting_depth: vec![0; m],
            ordered: vec![Vec::new(); n],
            reference: vec![None; m],
            lowpt_edge: vec![UNSET; m],
            stack_bottom: vec![0; m],
            stack: Vec::new(),
        }
    }

    fn orient(&mut self, v: usize) {
        let parent = self.parent_edge[v];
        for k in 0..self.adjacency[v].len() {
            let (w, vw) = self.adjacency[v][k];
            if self.oriented[vw] {
                continue;
            }
            self.oriented[vw] = true;
            self.source[vw] = v;
            self.target[vw] = w;
            self.ordered[v].push(vw);
            self.lowpt[vw] = self.height[v];
            self.lowpt2[vw] = self.height[v];
            if self.height[w] == UNSET {
                // tree edge
                self.parent_edge[w] = Some(vw);
                self.height[w] = self.height[v] + 1;
                self.orient(w);
            } else {
                // back edge
                self.lowpt[vw] = self.height[w];
            }

            self.nesting_depth[vw] = 2 * self.lowpt[vw];
            if self.lowpt2[vw] < self.height[v] {
                self.nesting_depth[vw] += 1;
            }

            if let Some(e) = parent {
                if self.lowpt[vw] < self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt[e].min(self.lowpt2[vw]);
                    self.lowpt[e] = self.lowpt[vw];
                } else if self.lowpt[vw] > self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt[vw]);
                } else {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt2[vw]);
                }
            }
        }
    }

    fn conflicting(&self, interval: &Interval, e: EdgeId) -> bool {
        match interval.high {
            Some(h) => self.lowpt[h] > self.lowpt[e],
            None => false,
        }
    }

    fn lowest(&self, pair: &ConflictPair) -> usize {
        match (pair.left.low, pair.right.low) {
            (None, Some(r)) => self.lowpt[r],
            (Some(l), None) => self.lowpt[l],
            (Some(l), Some(r)) => self.lowpt[l].min(self.lowpt[r]),
            (None, None) => unreachable!("empty conflict pair on the stack"),
        }
    }

    fn test(&mut self, v: usize) -> bool {
        let parent = self.parent_edge[v];
        for k in 0..self.ordered[v].len() {
            let ei = self.ordered[v][k];
            let w = self.target[ei];
            self.stack_bottom[ei] = self.stack.len();
            if self.parent_edge[w] == Some(ei) {
                if !self.test(w) {
                    return false;
                }
            } else {
                self.lowpt_edge[ei] = ei;
                self.stack.push(ConflictPair {
                    left: Interval::default(),
                    right: Interval::single(ei),
                });
            }

            if self.lowpt[ei] < self.height[v] {
                // v is not the root here, since nothing returns below height 0
                let e = parent.expect("return edge below the root");
                if k == 0 {
                    self.lowpt_edge[e] = self.lowpt_edge[ei];
                } else if !self.add_constraints(ei, e) {
                    return false;
                }
            }
        }
        if let Some(e) = parent {
            self.remove_back_edges(e);
        }
        true
    }

    fn add_constraints(&mut self, ei: EdgeId, e: EdgeId) -> bool {
        let mut p = ConflictPair::default();

        // merge return edges of ei into p.right
        loop {
            let mut q = self.stack.pop().expect("conflict stack underflow");
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            let q_low = q.right.low.expect("non-empty interval");
            if self.lowpt[q_low] > self.lowpt[e] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else if let Some(pl) = p.right.low {
                    self.reference[pl] = q.right.high;
                }
                p.right.low = q.right.low;
            } else {
                self.reference[q_low] = Some(self.lowpt_edge[e]);
            }
            if self.stack.len() == self.stack_bottom[ei] {
                break;
            }
        }

        // merge conflicting return edges of the earlier siblings into p.left
        while let Some(top) = self.stack.last() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().expect("checked above");
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            if let Some(pl) = p.right.low {
                self.reference[pl] = q.right.high;
            }
            if q.right.low.is_some() {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left = q.left;
            } else if let Some(pl) = p.left.low {
                self.reference[pl] = q.left.high;
            }
            p.left.low = q.left.low;
        }

        if !p.is_empty() {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: EdgeId) {
        let u = self.source[e];

        // drop pairs whose lowest return edge ends at u
        while let Some(top) = self.stack.last() {
            if self.lowest(top) != self.height[u] {
                break;
            }
            self.stack.pop();
        }

        if let Some(mut p) = self.stack.pop() {
            while let Some(h) = p.left.high {
                if self.target[h] != u {
                    break;
                }
                p.left.high = self.reference[h];
            }
            if p.left.high.is_none() {
                if let Some(low) = p.left.low.take() {
                    self.reference[low] = p.right.low;
                }
            }
            while let Some(h) = p.right.high {
                if self.target[h] != u {
                    break;
                }
                p.right.high = self.reference[h];
            }
            if p.right.high.is_none() {
                if let Some(low) = p.right.low.take() {
                    self.reference[low] = p.left.low;
                }
            }
            self.stack.push(p);
        }

        if self.lowpt[e] < self.height[u] {
            let top = self.stack.last().expect("return edges pending");
            let (hl, hr) = (top.left.high, top.right.high);
            self.reference[e] = match (hl, hr) {
                (Some(l), Some(r)) if self.lowpt[l] > self.lowpt[r] => Some(l),
                (Some(l), None) => Some(l),
                _ => hr,
            };
        }
    }
}

/// Planarity of an edge list over vertices `0..n`. Self-loops and
/// duplicate edges must not be present.
pub(crate) fn is_planar_edges(n: usize, edges: &[(usize, usize)]) -> bool {
    if n < 5 || edges.len() < 9 {
        return true;
    }
    if edges.len() > 3 * n - 6 {
        return false;
    }
    let mut st = LrState::new(n, edges);
    let mut roots = Vec::new();
    for v in 0..n {
        if st.height[v] == UNSET {
            st.height[v] = 0;
            roots.push(v);
            st.orient(v);
        }
    }
    for v in 0..n {
        let depth = &st.nesting_depth;
        st.ordered[v].sort_by_key(|&e| depth[e]);
    }
    roots.into_iter().all(|r| st.test(r))
}

/// True iff the network admits a planar embedding.
///
/// Rejects immediately when `|E| > 3n - 6`; otherwise runs the linear-time
/// left-right test. Deterministic: adjacency is visited in ascending order.
pub fn is_planar(network: &Network) -> bool {
    let edges: Vec<(usize, usize)> = network.edges().map(|(u, v, _)| (u, v)).collect();
    is_planar_edges(network.n(), &edges)
}
