//! Node potentials and the in-tree built from them.
//!
//! Every point gets a potential `P_i = -sum_j exp(-d(i, j)^2 / sigma)`
//! (self term included), so dense regions sit low. Each point then links to
//! its nearest neighbour among the points of strictly lower potential. The
//! point of globally minimal potential has no such neighbour and becomes
//! the root.
//!
//! Potentials are compared by `rank(i) = (P_i, i)` in lexicographic order,
//! which breaks ties between equal potentials by node index. Distance ties
//! when choosing a parent go to the smallest node index.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::dataset::DistanceMatrix;
use crate::error::{Error, Result};
use crate::tree::{RootedTree, WeightedTree};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialVector {
    values: Vec<f64>,
    sigma: f64,
}

impl PotentialVector {
    pub fn new(values: Vec<f64>, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("potentials must be finite".into()));
        }
        Ok(Self { values, sigma })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Total order on nodes: by potential, then by index.
    pub fn rank_cmp(&self, a: usize, b: usize) -> Ordering {
        self.values[a]
            .total_cmp(&self.values[b])
            .then_with(|| a.cmp(&b))
    }

    /// Node indices sorted from lowest to highest rank.
    pub fn rank_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&a, &b| self.rank_cmp(a, b));
        order
    }

    pub fn subset(&self, nodes: &[usize]) -> PotentialVector {
        PotentialVector {
            values: nodes.iter().map(|&i| self.values[i]).collect(),
            sigma: self.sigma,
        }
    }
}

pub(crate) fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSigma(sigma))
    }
}

/// `P_i = -sum_j exp(-D[i][j]^2 / sigma)`, summed in index order `j = 0..N`.
pub fn compute_potentials(dist: &DistanceMatrix, sigma: f64) -> Result<PotentialVector> {
    check_sigma(sigma)?;
    let values = (0..dist.len())
        .map(|i| {
            -dist
                .row(i)
                .iter()
                .map(|&d| (-(d * d) / sigma).exp())
                .sum::<f64>()
        })
        .collect();
    Ok(PotentialVector { values, sigma })
}

/// Square of the median off-diagonal pairwise distance.
///
/// Falls back to the median of the strictly positive distances when more
/// than half the pairs coincide, and to 1 when there are none.
pub fn default_sigma(dist: &DistanceMatrix) -> f64 {
    let n = dist.len();
    let mut pairs: Vec<f64> = (0..n)
        .flat_map(|i| dist.row(i)[i + 1..].iter().copied())
        .collect();
    let median = median(&mut pairs).filter(|&m| m > 0.0).or_else(|| {
        let mut positive: Vec<f64> = pairs.into_iter().filter(|&d| d > 0.0).collect();
        median(&mut positive)
    });
    median.map_or(1.0, |m| m * m)
}

fn median(values: &mut [f64]) -> Option<f64> {
    let len = values.len();
    if len == 0 {
        return None;
    }
    let mid = len / 2;
    let (lower, upper, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if len % 2 == 1 {
        Some(upper)
    } else {
        let below = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(0.5 * (below + upper))
    }
}

/// Directed tree in which every edge descends in rank.
#[derive(Clone, Debug, PartialEq)]
pub struct InTree {
    tree: RootedTree,
    potentials: PotentialVector,
}

impl InTree {
    /// Wrap an existing parent structure, checking that every edge descends
    /// in rank (which also pins the root to the rank minimum).
    pub fn from_parts(tree: RootedTree, potentials: PotentialVector) -> Result<Self> {
        if tree.len() != potentials.len() {
            return Err(Error::InvalidArgument(format!(
                "{} potentials for {} nodes",
                potentials.len(),
                tree.len()
            )));
        }
        for (child, parent, _) in tree.edges() {
            if potentials.rank_cmp(parent, child) != Ordering::Less {
                return Err(Error::InvalidArgument(format!(
                    "edge {child} -> {parent} does not descend in potential"
                )));
            }
        }
        Ok(Self { tree, potentials })
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }

    pub fn root(&self) -> usize {
        self.tree.root()
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.tree.parent(i)
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        self.tree.edge_length(i)
    }

    /// `(child, parent, length)` triples ordered by child.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.tree.edges()
    }

    pub fn edge_count(&self) -> usize {
        self.tree.edge_count()
    }

    pub fn potentials(&self) -> &PotentialVector {
        &self.potentials
    }

    pub fn rooted(&self) -> &RootedTree {
        &self.tree
    }

    pub fn to_undirected(&self) -> WeightedTree {
        self.tree.to_undirected()
    }

    /// The sub-in-tree spanned by `nodes` (given in ascending order), which
    /// must be connected in this tree. The member whose parent lies outside
    /// the set, or the global root, becomes the new root.
    pub fn induced(&self, nodes: &[usize]) -> Result<InTree> {
        let n = self.len();
        let mut local = vec![usize::MAX; n];
        for (k, &v) in nodes.iter().enumerate() {
            if v >= n {
                return Err(Error::NodeOutOfRange { node: v, n });
            }
            local[v] = k;
        }
        let mut parent = Vec::with_capacity(nodes.len());
        let mut length = Vec::with_capacity(nodes.len());
        for &v in nodes {
            match self.parent(v).map(|p| local[p]) {
                Some(p) if p != usize::MAX => {
                    parent.push(Some(p));
                    length.push(self.edge_length(v));
                }
                _ => {
                    parent.push(None);
                    length.push(0.0);
                }
            }
        }
        let tree = RootedTree::from_parents(parent, length)
            .map_err(|_| Error::InvalidArgument("node set is not a connected subtree".into()))?;
        InTree::from_parts(tree, self.potentials.subset(nodes))
    }
}

/// Link every node to its nearest lower-rank node.
///
/// Nodes are visited in rank order; each scans the nodes already visited
/// (exactly its lower-rank candidates) for the smallest distance, keeping
/// the smallest index on ties.
pub fn build_in_tree(dist: &DistanceMatrix, potentials: &PotentialVector) -> Result<InTree> {
    let n = dist.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if potentials.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} potentials for {n} nodes",
            potentials.len()
        )));
    }
    let order = potentials.rank_order();
    let mut parent = vec![None; n];
    let mut length = vec![0.0; n];
    for (pos, &i) in order.iter().enumerate().skip(1) {
        let row = dist.row(i);
        let mut best = order[0];
        let mut best_d = row[best];
        for &k in &order[1..pos] {
            let d = row[k];
            if d < best_d || (d == best_d && k < best) {
                best = k;
                best_d = d;
            }
        }
        parent[i] = Some(best);
        length[i] = best_d;
    }
    let tree = RootedTree::from_parents(parent, length)?;
    Ok(InTree {
        tree,
        potentials: potentials.clone(),
    })
}

/// Erase edge directions, keeping lengths.
pub fn to_undirected(tree: &InTree) -> WeightedTree {
    tree.to_undirected()
}
