//! Core algorithms for IT-map: build a density-descending in-tree over a
//! dataset, measure path lengths along that tree, embed the tree in a
//! low-dimensional space with multidimensional scaling, and drive an
//! interactive cut-and-refine clustering session on top of the embedding.
//!
//! The pipeline, stage by stage:
//!
//! 1. [`dataset`]: load or synthesize points and compute pairwise distances.
//! 2. [`intree`]: assign each point a potential and link it to its nearest
//!    lower-potential neighbour, giving a directed tree with `N - 1` edges.
//! 3. [`tree`]: all-pairs path distances along the undirected tree.
//! 4. [`mds`]: embed those distances in `R^m` and attach a normalized
//!    potential axis for display.
//! 5. [`session`]: resolve clicks to edges, cut and restore edges, drag
//!    components, spawn divide/conquer child sessions and score results.

pub mod dataset;
pub mod document;
pub mod error;
pub mod intree;
pub mod layout;
pub mod mds;
pub mod render;
pub mod session;
pub mod tree;

pub use dataset::{AttrKind, Dataset, DistanceMatrix, Metric};
pub use document::SessionDocument;
pub use error::{Error, Result};
pub use intree::{InTree, PotentialVector};
pub use layout::Layout;
pub use mds::{Embedding, MdsMethod};
pub use session::{
    ChildKind, ClickSpace, ClusterAssignment, ConstraintSet, Session, SessionId, SessionParams,
    Sigma, ViolationReport, Workbench,
};
pub use tree::{RootedTree, TreeDistanceMatrix, WeightedTree};
