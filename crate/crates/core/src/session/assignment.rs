use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-node component ids, dense in `0..k` and numbered in order of each
/// component's smallest node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    component_of: Vec<usize>,
    k: usize,
}

impl ClusterAssignment {
    /// Renumber arbitrary per-node keys densely by first appearance.
    pub fn from_keys<K: Hash + Eq + Clone>(keys: &[K]) -> Self {
        let mut ids: HashMap<K, usize> = HashMap::new();
        let component_of = keys
            .iter()
            .map(|key| {
                let next = ids.len();
                *ids.entry(key.clone()).or_insert(next)
            })
            .collect();
        Self {
            component_of,
            k: ids.len(),
        }
    }

    pub fn component_of(&self) -> &[usize] {
        &self.component_of
    }

    pub fn get(&self, node: usize) -> usize {
        self.component_of[node]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.component_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.component_of.is_empty()
    }

    /// Nodes of component `c`, ascending.
    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| self.component_of[v] == c)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.component_of {
            sizes[c] += 1;
        }
        sizes
    }

    /// `node,component` rows with a header; node ids are mapped through
    /// `node_ids` when given.
    pub fn to_csv(&self, node_ids: Option<&[usize]>) -> String {
        let mut out = String::from("node,component\n");
        for (v, c) in self.component_of.iter().enumerate() {
            let id = node_ids.map_or(v, |ids| ids[v]);
            let _ = writeln!(out, "{id},{c}");
        }
        out
    }
}

/// Connected components of a tree after removing the cut edges. Edges are
/// `(child, parent)` pairs and an edge's id is its child.
pub fn components_of(
    n: usize,
    edges: impl IntoIterator<Item = (usize, usize)>,
    cuts: &BTreeSet<usize>,
) -> ClusterAssignment {
    let mut uf = UnionFind::new(n);
    for (child, parent) in edges {
        if !cuts.contains(&child) {
            uf.union(child, parent);
        }
    }
    let roots: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
    ClusterAssignment::from_keys(&roots)
}

/// Fraction of nodes whose class differs from the majority class of their
/// component.
pub fn error_rate(assignment: &ClusterAssignment, truth: &[u32]) -> Result<f64> {
    if truth.len() != assignment.len() {
        return Err(Error::MissingLabels);
    }
    if truth.is_empty() {
        return Ok(0.0);
    }
    let mut counts: Vec<BTreeMap<u32, usize>> = vec![BTreeMap::new(); assignment.k()];
    for (v, &label) in truth.iter().enumerate() {
        *counts[assignment.get(v)].entry(label).or_default() += 1;
    }
    let wrong: usize = counts
        .iter()
        .map(|c| c.values().sum::<usize>() - c.values().copied().max().unwrap_or(0))
        .sum();
    Ok(wrong as f64 / truth.len() as f64)
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// False when `a` and `b` were already connected.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}
