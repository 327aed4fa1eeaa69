//! Tree path metrics.
//!
//! A [`RootedTree`] stores one parent pointer per non-root node. Dropping
//! the directions gives a [`WeightedTree`], whose unique simple paths define
//! the tree distance `d_T(i, j)`: the sum of edge lengths between `i` and `j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A tree with every non-root node pointing at its parent. The edge owned
/// by node `i` runs from `i` to `parent[i]` with length `length[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootedTree {
    parent: Vec<Option<usize>>,
    length: Vec<f64>,
    root: usize,
}

impl RootedTree {
    /// Validate and wrap parent pointers and edge lengths. The root is the
    /// single node without a parent; its length entry must be zero.
    pub fn from_parents(parent: Vec<Option<usize>>, length: Vec<f64>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if length.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{} edge lengths for {n} nodes",
                length.len()
            )));
        }
        let mut root = None;
        for (i, p) in parent.iter().enumerate() {
            match *p {
                None if root.is_some() => {
                    return Err(Error::InvalidArgument("more than one root".into()))
                }
                None => {
                    if length[i] != 0.0 {
                        return Err(Error::InvalidArgument("root carries an edge length".into()));
                    }
                    root = Some(i);
                }
                Some(p) if p >= n => return Err(Error::NodeOutOfRange { node: p, n }),
                Some(_) if !(length[i].is_finite() && length[i] >= 0.0) => {
                    return Err(Error::InvalidArgument(format!(
                        "edge {i} has invalid length {}",
                        length[i]
                    )))
                }
                Some(_) => {}
            }
        }
        let root = root.ok_or_else(|| Error::InvalidArgument("no root".into()))?;

        // Every node must reach the root; 0 = unvisited, 1 = on stack, 2 = done.
        let mut state = vec![0u8; n];
        state[root] = 2;
        let mut chain = Vec::new();
        for start in 0..n {
            let mut v = start;
            while state[v] == 0 {
                state[v] = 1;
                chain.push(v);
                v = parent[v].expect("only the root lacks a parent");
            }
            if state[v] == 1 {
                return Err(Error::InvalidArgument(format!("cycle through node {v}")));
            }
            for u in chain.drain(..) {
                state[u] = 2;
            }
        }
        Ok(Self {
            parent,
            length,
            root,
        })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    /// Length of the edge owned by `i` (0 for the root).
    pub fn edge_length(&self, i: usize) -> f64 {
        self.length[i]
    }

    pub fn lengths(&self) -> &[f64] {
        &self.length
    }

    /// `(child, parent, length)` for every edge, ordered by child index.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (i, p, self.length[i])))
    }

    pub fn edge_count(&self) -> usize {
        self.parent.len() - 1
    }

    /// Nodes from `i` up to and including the root.
    pub fn chain_to_root(&self, i: usize) -> Vec<usize> {
        let mut chain = vec![i];
        let mut v = i;
        while let Some(p) = self.parent[v] {
            chain.push(p);
            v = p;
        }
        chain
    }

    /// The same undirected tree with all parent pointers leading to
    /// `new_root`. Only the edges on the path between the old and new root
    /// flip direction; each keeps its length.
    pub fn reroot(&self, new_root: usize) -> Result<RootedTree> {
        let n = self.len();
        if new_root >= n {
            return Err(Error::NodeOutOfRange { node: new_root, n });
        }
        let mut parent = self.parent.clone();
        let mut length = self.length.clone();
        let chain = self.chain_to_root(new_root);
        for pair in chain.windows(2).rev() {
            let (child, up) = (pair[0], pair[1]);
            parent[up] = Some(child);
            length[up] = self.length[child];
        }
        parent[new_root] = None;
        length[new_root] = 0.0;
        Ok(RootedTree {
            parent,
            length,
            root: new_root,
        })
    }

    /// Erase edge directions.
    pub fn to_undirected(&self) -> WeightedTree {
        WeightedTree::from_edges_unchecked(self.len(), self.edges().collect())
    }
}

/// Undirected tree on `n` nodes with `n - 1` weighted edges.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedTree {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl WeightedTree {
    /// Build a tree from `(u, v, length)` triples, checking that they form a
    /// spanning tree with finite nonnegative lengths.
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if edges.len() != n - 1 {
            return Err(Error::InvalidArgument(format!(
                "a tree on {n} nodes has {} edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let mut links: Vec<usize> = (0..n).collect();
        fn find(links: &mut [usize], mut v: usize) -> usize {
            while links[v] != v {
                links[v] = links[links[v]];
                v = links[v];
            }
            v
        }
        for &(u, v, w) in &edges {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) has length {w}"
                )));
            }
            let (a, b) = (find(&mut links, u), find(&mut links, v));
            if a == b {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) closes a cycle"
                )));
            }
            links[a] = b;
        }
        Ok(Self::from_edges_unchecked(n, edges))
    }

    fn from_edges_unchecked(n: usize, edges: Vec<(usize, usize, f64)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v, w) in &edges {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        Self {
            n,
            edges,
            adjacency,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    /// Distances from `source` to every node, accumulated outward along a
    /// depth-first traversal.
    pub fn distances_from(&self, source: usize) -> Vec<f64> {
        let mut dist = vec![0.0; self.n];
        let mut stack = vec![(source, usize::MAX)];
        while let Some((v, from)) = stack.pop() {
            for &(w, len) in &self.adjacency[v] {
                if w != from {
                    dist[w] = dist[v] + len;
                    stack.push((w, v));
                }
            }
        }
        dist
    }

    /// All-pairs path distances, one traversal per source. Entry `(i, j)`
    /// with `i < j` is taken from source `i` and mirrored, so the matrix is
    /// exactly symmetric.
    pub fn tree_distances(&self) -> TreeDistanceMatrix {
        let n = self.n;
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            let row = self.distances_from(i);
            for j in i + 1..n {
                values[i * n + j] = row[j];
                values[j * n + i] = row[j];
            }
        }
        TreeDistanceMatrix { n, values }
    }

    /// The unique simple path from `i` to `j`, both included.
    pub fn path(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        for node in [i, j] {
            if node >= self.n {
                return Err(Error::NodeOutOfRange { node, n: self.n });
            }
        }
        let mut prev = vec![usize::MAX; self.n];
        prev[i] = i;
        let mut stack = vec![i];
        while let Some(v) = stack.pop() {
            if v == j {
                break;
            }
            for &(w, _) in &self.adjacency[v] {
                if prev[w] == usize::MAX {
                    prev[w] = v;
                    stack.push(w);
                }
            }
        }
        let mut path = vec![j];
        let mut v = j;
        while v != i {
            v = prev[v];
            path.push(v);
        }
        path.reverse();
        Ok(path)
    }
}

/// Dense symmetric matrix of tree path distances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeDistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl TreeDistanceMatrix {
    /// Wrap a row-major `n x n` matrix. Shape is checked; symmetry is the
    /// caller's responsibility.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "{} values for a {n}x{n} matrix",
                values.len()
            )));
        }
        Ok(Self { n, values })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Entries restricted to `nodes`, copied verbatim.
    pub fn submatrix(&self, nodes: &[usize]) -> TreeDistanceMatrix {
        let k = nodes.len();
        let mut values = Vec::with_capacity(k * k);
        for &i in nodes {
            let row = self.row(i);
            values.extend(nodes.iter().map(|&j| row[j]));
        }
        TreeDistanceMatrix { n: k, values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> RootedTree {
        // 0 -> 1 <- 2
        RootedTree::from_parents(vec![Some(1), None, Some(1)], vec![1.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn rejects_cycles_and_multiple_roots() {
        assert!(
            RootedTree::from_parents(vec![Some(1), Some(0), None], vec![1.0, 1.0, 0.0]).is_err()
        );
        assert!(RootedTree::from_parents(vec![None, None], vec![0.0, 0.0]).is_err());
        assert!(RootedTree::from_parents(vec![Some(0)], vec![1.0]).is_err());
        assert!(RootedTree::from_parents(vec![Some(5), None], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn reroot_at_current_root_is_identity() {
        let t = chain();
        assert_eq!(t.reroot(1).unwrap(), t);
    }

    #[test]
    fn reroot_flips_path_edges() {
        let t = chain().reroot(0).unwrap();
        assert_eq!(t.root(), 0);
        assert_eq!(t.parents(), &[None, Some(0), Some(1)]);
        assert_eq!(t.lengths(), &[0.0, 1.0, 1.0]);
    }

    #[test]
    fn reroot_twice_restores_original() {
        let t = RootedTree::from_parents(
            vec![Some(1), Some(2), None, Some(2), Some(3)],
            vec![0.5, 1.5, 0.0, 2.0, 3.0],
        )
        .unwrap();
        let back = t.reroot(4).unwrap().reroot(2).unwrap();
        assert_eq!(back, t);
        assert!(t.reroot(5).is_err());
    }

    #[test]
    fn chain_distances_and_paths() {
        let w = chain().to_undirected();
        let d = w.tree_distances();
        assert_eq!(d.get(0, 2), 2.0);
        assert_eq!(d.get(1, 1), 0.0);
        assert_eq!(w.path(0, 2).unwrap(), vec![0, 1, 2]);
        assert_eq!(w.path(2, 0).unwrap(), vec![2, 1, 0]);
        assert_eq!(w.path(1, 1).unwrap(), vec![1]);
        assert!(w.path(0, 3).is_err());
    }

    #[test]
    fn single_node_tree() {
        let t = RootedTree::from_parents(vec![None], vec![0.0]).unwrap();
        let w = t.to_undirected();
        assert!(w.edges().is_empty());
        assert_eq!(w.tree_distances().values(), &[0.0]);
    }

    #[test]
    fn weighted_tree_validation() {
        assert!(WeightedTree::new(3, vec![(0, 1, 1.0)]).is_err());
        assert!(WeightedTree::new(3, vec![(0, 1, 1.0), (1, 0, 1.0)]).is_err());
        assert!(WeightedTree::new(2, vec![(0, 1, -1.0)]).is_err());
        assert!(WeightedTree::new(2, vec![(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn submatrix_copies_entries() {
        let w = WeightedTree::new(4, vec![(0, 1, 1.0), (1, 2, 2.0), (2, 3, 4.0)]).unwrap();
        let d = w.tree_distances();
        let sub = d.submatrix(&[1, 3]);
        assert_eq!(sub.values(), &[0.0, 6.0, 6.0, 0.0]);
    }
}
