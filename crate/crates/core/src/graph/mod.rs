//! Undirected weighted networks over labeled stocks.

mod cliques;
mod planarity;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{Error, Result};
use nalgebra::DMatrix;

pub use cliques::{enumerate_m_cliques, maximal_cliques, maximal_cliques_min_size, Clique};
pub use planarity::is_planar;
pub(crate) use planarity::is_planar_edges;

/// Undirected graph with weighted edges and optional sector labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    stocks: Vec<String>,
    sectors: Option<Vec<String>>,
    adj: Vec<BTreeSet<usize>>,
    weights: BTreeMap<(usize, usize), f64>,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Network {
    /// Edgeless network over `stocks`.
    pub fn new(stocks: Vec<String>) -> Self {
        let n = stocks.len();
        Self {
            stocks,
            sectors: None,
            adj: vec![BTreeSet::new(); n],
            weights: BTreeMap::new(),
        }
    }

    /// Edgeless network with `n` vertices named `0..n`.
    pub fn with_order(n: usize) -> Self {
        Self::new((0..n).map(|i| i.to_string()).collect())
    }

    /// Unit-weight network from an edge list (handy for tests).
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::with_order(n);
        for &(u, v) in edges {
            g.add_edge(u, v, 1.0)?;
        }
        Ok(g)
    }

    pub fn set_sectors(&mut self, sectors: Vec<String>) -> Result<()> {
        if sectors.len() != self.n() {
            return Err(Error::ShapeMismatch(format!(
                "{} sector labels for {} vertices",
                sectors.len(),
                self.n()
            )));
        }
        self.sectors = Some(sectors);
        Ok(())
    }

    pub fn sectors(&self) -> Option<&[String]> {
        self.sectors.as_deref()
    }

    pub fn stocks(&self) -> &[String] {
        &self.stocks
    }

    pub fn n(&self) -> usize {
        self.stocks.len()
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    /// Adds `{u, v}`; fails on self-loops, duplicates, out-of-range
    /// endpoints, or weights outside `[0, 1]`.
    pub fn add_edge(&mut self, u: usize, v: usize, weight: f64) -> Result<()> {
        let n = self.n();
        if u >= n || v >= n {
            return Err(Error::InvalidNetwork(format!(
                "edge ({u}, {v}) out of range for {n} vertices"
            )));
        }
        if u == v {
            return Err(Error::InvalidNetwork(format!("self-loop at {u}")));
        }
        if !(0.0..=1.0 + 1e-9).contains(&weight) {
            return Err(Error::InvalidNetwork(format!(
                "weight {weight} on ({u}, {v}) outside [0, 1]"
            )));
        }
        if self.weights.insert(key(u, v), weight).is_some() {
            return Err(Error::InvalidNetwork(format!("duplicate edge ({u}, {v})")));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    /// Removes `{u, v}` and returns its weight, if present.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> Option<f64> {
        let w = self.weights.remove(&key(u, v))?;
        self.adj[u].remove(&v);
        self.adj[v].remove(&u);
        Some(w)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.weights.contains_key(&key(u, v))
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.weights.get(&key(u, v)).copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(BTreeSet::len).collect()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub(crate) fn neighbor_set(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    /// Edges as `(u, v, weight)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.weights.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    /// Dense 0/1 adjacency matrix.
    pub fn binary_adjacency(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n(), self.n());
        for (u, v, _) in self.edges() {
            m[(u, v)] = 1.0;
            m[(v, u)] = 1.0;
        }
        m
    }

    /// Dense weighted adjacency matrix.
    pub fn weighted_adjacency(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n(), self.n());
        for (u, v, w) in self.edges() {
            m[(u, v)] = w;
            m[(v, u)] = w;
        }
        m
    }

    /// Number of connected components (isolated vertices count).
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n()];
        let mut count = 0;
        for start in 0..self.n() {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    /// Writes the edge list `u,v,weight`.
    pub fn write_edges(&self, path: &Path) -> Result<()> {
        let mut out = String::from("u,v,weight\n");
        for (u, v, w) in self.edges() {
            out.push_str(&format!("{u},{v},{w:.16e}\n"));
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Writes the vertex table `index,stock,sector` (empty sector when unknown).
    pub fn write_vertices(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: e.to_string(),
        })?;
        let io = |e: csv::Error| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: e.to_string(),
        };
        w.write_record(["index", "stock", "sector"]).map_err(io)?;
        for (i, stock) in self.stocks.iter().enumerate() {
            let sector = self.sectors.as_ref().map_or("", |s| s[i].as_str());
            w.write_record([i.to_string().as_str(), stock, sector])
                .map_err(io)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Reads a network back from its vertex table and edge list.
    pub fn read(vertices: &Path, edges: &Path) -> Result<Self> {
        let parse = |path: &Path, e: csv::Error| Error::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        };
        let mut rdr = csv::Reader::from_path(vertices).map_err(|e| parse(vertices, e))?;
        let mut stocks = Vec::new();
        let mut sectors = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| parse(vertices, e))?;
            if rec[0].parse::<usize>().ok() != Some(i) {
                return Err(Error::Parse {
                    path: vertices.to_path_buf(),
                    line: i as u64 + 2,
                    message: format!("expected index {i}"),
                });
            }
            stocks.push(rec[1].to_string());
            sectors.push(rec[2].to_string());
        }
        let mut g = Self::new(stocks);
        if sectors.iter().all(|s| !s.is_empty()) {
            g.set_sectors(sectors)?;
        }
        let mut rdr = csv::Reader::from_path(edges).map_err(|e| parse(edges, e))?;
        for rec in rdr.records() {
            let rec = rec.map_err(|e| parse(edges, e))?;
            let line = rec.position().map_or(0, |p| p.line());
            let bad = |m: &str| Error::Parse {
                path: edges.to_path_buf(),
                line,
                message: m.to_string(),
            };
            let u = rec[0].parse().map_err(|_| bad("bad vertex index"))?;
            let v = rec[1].parse().map_err(|_| bad("bad vertex index"))?;
            let w = rec[2].parse().map_err(|_| bad("bad weight"))?;
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }
}
