//! Shared fixtures for the pipeline benchmarks.

use itmap_core::dataset::{distance_matrix, generate_gaussian_mixture};
use itmap_core::intree::{build_in_tree, compute_potentials, default_sigma};
use itmap_core::{DistanceMatrix, InTree, Metric, TreeDistanceMatrix};

/// Sizes swept by every benchmark group.
pub const SIZES: [usize; 3] = [256, 512, 1024];

/// Distance matrix of a 16-blob mixture in R^32 with `n` points.
pub fn mixture_distances(n: usize) -> DistanceMatrix {
    let ds = generate_gaussian_mixture(n.div_ceil(16), 32, 16, 16.0, 7).expect("valid mixture");
    distance_matrix(&ds, Metric::Euclidean).expect("numeric data")
}

pub fn mixture_tree(n: usize) -> (InTree, TreeDistanceMatrix) {
    let dist = mixture_distances(n);
    let p = compute_potentials(&dist, default_sigma(&dist)).expect("positive sigma");
    let tree = build_in_tree(&dist, &p).expect("non-empty input");
    let d = tree.to_undirected().tree_distances();
    (tree, d)
}
