//! The interactive clustering state machine.
//!
//! A [`Session`] owns one embedded in-tree and the user's edits on top of
//! it: cut edges, per-node display offsets, constraints and links to child
//! sessions. Edge ids are child-node indices and stay stable across cuts.
//! A [`Workbench`] stores datasets and sessions and wires children to
//! their parents.

mod assignment;
mod constraints;
mod geometry;
mod workbench;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dataset::{distance_matrix, AttrKind, Dataset, Metric};
use crate::error::{Error, Result};
use crate::intree::{build_in_tree, compute_potentials, default_sigma, InTree, PotentialVector};
use crate::mds::{embed, Embedding, MdsMethod};
use crate::tree::TreeDistanceMatrix;

pub use assignment::{components_of, error_rate, ClusterAssignment};
pub use constraints::{ConstraintSet, MixedComponent, ViolationReport};
pub use geometry::{point_segment_distance_sq, ClickSpace};
pub use workbench::Workbench;

pub type SessionId = u64;

pub const MAX_DIM: usize = 3;

/// Kernel width: a fixed value or the median-squared-distance default.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Sigma {
    #[default]
    Auto,
    Value(f64),
}

impl Sigma {
    pub fn resolve(self, dist: &crate::dataset::DistanceMatrix) -> Result<f64> {
        match self {
            Sigma::Auto => Ok(default_sigma(dist)),
            Sigma::Value(s) if s.is_finite() && s > 0.0 => Ok(s),
            Sigma::Value(s) => Err(Error::InvalidSigma(s)),
        }
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma::Auto => f.write_str("auto"),
            Sigma::Value(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for Sigma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Sigma::Auto);
        }
        let value: f64 = s.trim().parse().map_err(|_| {
            Error::InvalidArgument(format!("sigma must be a number or `auto`, got `{s}`"))
        })?;
        if value.is_finite() && value > 0.0 {
            Ok(Sigma::Value(value))
        } else {
            Err(Error::InvalidSigma(value))
        }
    }
}

impl Serialize for Sigma {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Sigma::Auto => serializer.serialize_str("auto"),
            Sigma::Value(s) => serializer.serialize_f64(*s),
        }
    }
}

impl<'de> Deserialize<'de> for Sigma {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(v) if v.is_finite() && v > 0.0 => Ok(Sigma::Value(v)),
            Raw::Number(v) => Err(serde::de::Error::custom(format!(
                "sigma must be positive, got {v}"
            ))),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Pipeline settings for a new session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionParams {
    pub sigma: Sigma,
    /// Defaults to the metric matching the dataset's attribute kind.
    pub metric: Option<Metric>,
    pub dim: usize,
    pub method: MdsMethod,
}

impl Default for SessionParams {
    fn default() -> Self {
        Self {
            sigma: Sigma::Auto,
            metric: None,
            dim: 1,
            method: MdsMethod::Classical,
        }
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::InvalidDimension {
            dim,
            reason: "must be between 1 and 3",
        })
    }
}

/// Identity of the root dataset a session draws its points from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRef {
    pub id: String,
    pub n: usize,
    pub d: usize,
    pub attr_kind: AttrKind,
}

impl DatasetRef {
    pub fn of(id: impl Into<String>, ds: &Dataset) -> Self {
        Self {
            id: id.into(),
            n: ds.len(),
            d: ds.dim(),
            attr_kind: ds.kind(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChildKind {
    /// Re-embed a component from its existing tree distances.
    Divide,
    /// Rebuild a component from its raw points with a new sigma.
    Conquer,
}

impl fmt::Display for ChildKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChildKind::Divide => "divide",
            ChildKind::Conquer => "conquer",
        })
    }
}

/// A parent's record of one child session.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChildLink {
    /// Parent component id at creation time.
    pub component: usize,
    pub session: SessionId,
    pub kind: ChildKind,
    /// Finalized children replace their component in merged assignments.
    pub finalized: bool,
}

/// A child's record of where it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Origin {
    pub parent: SessionId,
    pub component: usize,
    pub kind: ChildKind,
}

#[derive(Clone, Debug)]
pub struct Session {
    pub(crate) id: SessionId,
    pub(crate) dataset: DatasetRef,
    pub(crate) node_ids: Vec<usize>,
    pub(crate) metric: Metric,
    pub(crate) dim: usize,
    pub(crate) method: MdsMethod,
    pub(crate) tree: Arc<InTree>,
    pub(crate) dist: Arc<TreeDistanceMatrix>,
    pub(crate) embedding: Arc<Embedding>,
    pub(crate) cuts: BTreeSet<usize>,
    /// Display offsets in the embedding space, keyed by node; zero offsets
    /// are not stored.
    pub(crate) offsets: BTreeMap<usize, Vec<f64>>,
    pub(crate) children: Vec<ChildLink>,
    pub(crate) origin: Option<Origin>,
    pub(crate) constraints: ConstraintSet,
}

impl Session {
    /// Run the full pipeline over a root dataset: distances, potentials,
    /// in-tree, tree distances and embedding. The session starts uncut.
    pub fn create(
        id: SessionId,
        dataset_id: impl Into<String>,
        ds: &Dataset,
        params: &SessionParams,
    ) -> Result<Session> {
        let metric = params.metric.unwrap_or_else(|| Metric::for_kind(ds.kind()));
        let pipeline = Pipeline::run(ds, metric, params.sigma, params.dim, params.method)?;
        Ok(pipeline.into_session(
            id,
            DatasetRef::of(dataset_id, ds),
            (0..ds.len()).collect(),
            None,
            ConstraintSet::default(),
        ))
    }

    pub fn id(&self) -> SessionId {
        self.id
    }

    pub fn dataset(&self) -> &DatasetRef {
        &self.dataset
    }

    /// Root-dataset index of every node, ascending.
    pub fn node_ids(&self) -> &[usize] {
        &self.node_ids
    }

    /// Session-local index of a root-dataset node.
    pub fn local_index(&self, root_node: usize) -> Option<usize> {
        self.node_ids.binary_search(&root_node).ok()
    }

    pub fn len(&self) -> usize {
        self.node_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_ids.is_empty()
    }

    pub fn sigma(&self) -> f64 {
        self.tree.potentials().sigma()
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn method(&self) -> MdsMethod {
        self.method
    }

    pub fn tree(&self) -> &InTree {
        &self.tree
    }

    pub fn potentials(&self) -> &PotentialVector {
        self.tree.potentials()
    }

    pub fn tree_distances(&self) -> &TreeDistanceMatrix {
        &self.dist
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    pub fn cuts(&self) -> &BTreeSet<usize> {
        &self.cuts
    }

    pub fn offsets(&self) -> &BTreeMap<usize, Vec<f64>> {
        &self.offsets
    }

    /// Display offset of one node (zero when unset).
    pub fn offset(&self, node: usize) -> Vec<f64> {
        self.offsets
            .get(&node)
            .cloned()
            .unwrap_or_else(|| vec![0.0; self.dim])
    }

    pub fn children(&self) -> &[ChildLink] {
        &self.children
    }

    pub fn origin(&self) -> Option<&Origin> {
        self.origin.as_ref()
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn components(&self) -> ClusterAssignment {
        components_of(
            self.len(),
            self.tree.edges().map(|(c, p, _)| (c, p)),
            &self.cuts,
        )
    }

    pub fn edge_exists(&self, e: usize) -> bool {
        e < self.len() && self.tree.parent(e).is_some()
    }

    pub fn uncut_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.tree
            .edges()
            .map(|(c, _, _)| c)
            .filter(|c| !self.cuts.contains(c))
    }

    /// Display position of a node: embedding coordinates plus offset, and
    /// the potential axis value in `rp` space.
    pub fn position(&self, node: usize, space: ClickSpace) -> Vec<f64> {
        let mut p = self.embedding.coords.row(node).to_vec();
        if let Some(delta) = self.offsets.get(&node) {
            p.iter_mut().zip(delta).for_each(|(x, d)| *x += d);
        }
        if space == ClickSpace::Rp {
            p.push(self.embedding.potential_axis[node]);
        }
        p
    }

    /// The uncut edge whose display segment lies closest to `click`;
    /// ties go to the smaller edge id.
    pub fn nearest_edge(&self, click: &[f64], space: ClickSpace) -> Result<usize> {
        let want = match space {
            ClickSpace::Rp => self.dim + 1,
            ClickSpace::R => self.dim,
        };
        if click.len() != want || click.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "a click in {space} space needs {want} finite coordinates, got {}",
                click.len()
            )));
        }
        let mut best: Option<(usize, f64)> = None;
        for e in self.uncut_edges() {
            let parent = self.tree.parent(e).expect("edge ids are non-root nodes");
            let d = point_segment_distance_sq(
                click,
                &self.position(e, space),
                &self.position(parent, space),
            );
            if best.map_or(true, |(_, b)| d < b) {
                best = Some((e, d));
            }
        }
        best.map(|(e, _)| e).ok_or(Error::NoUncutEdges)
    }

    pub fn cut_edge(&mut self, e: usize) -> Result<ClusterAssignment> {
        if !self.edge_exists(e) {
            return Err(Error::EdgeNotFound(e));
        }
        if !self.cuts.insert(e) {
            return Err(Error::EdgeAlreadyCut(e));
        }
        Ok(self.components())
    }

    pub fn restore_edge(&mut self, e: usize) -> Result<ClusterAssignment> {
        if !self.edge_exists(e) {
            return Err(Error::EdgeNotFound(e));
        }
        if !self.cuts.remove(&e) {
            return Err(Error::EdgeNotCut(e));
        }
        Ok(self.components())
    }

    /// Resolve a click to its nearest edge and cut it.
    pub fn cross(
        &mut self,
        click: &[f64],
        space: ClickSpace,
    ) -> Result<(usize, ClusterAssignment)> {
        let e = self.nearest_edge(click, space)?;
        let assignment = self.cut_edge(e)?;
        Ok((e, assignment))
    }

    /// The `k` longest uncut edges, by length descending then id ascending.
    pub fn longest_edges(&self, k: usize) -> Result<Vec<usize>> {
        let mut edges: Vec<(usize, f64)> = self
            .tree
            .edges()
            .filter(|(c, _, _)| !self.cuts.contains(c))
            .map(|(c, _, len)| (c, len))
            .collect();
        if k > edges.len() {
            return Err(Error::InvalidArgument(format!(
                "cannot cut {k} edges, only {} uncut edges remain",
                edges.len()
            )));
        }
        edges.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        Ok(edges.into_iter().take(k).map(|(c, _)| c).collect())
    }

    pub fn cut_longest(&mut self, k: usize) -> Result<ClusterAssignment> {
        for e in self.longest_edges(k)? {
            self.cuts.insert(e);
        }
        Ok(self.components())
    }

    /// Set the display offset of every node in component `c` to `delta`.
    /// Cluster membership is unaffected.
    pub fn set_component_offset(&mut self, c: usize, delta: &[f64]) -> Result<()> {
        if delta.len() != self.dim || delta.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "offset needs {} finite coordinates, got {}",
                self.dim,
                delta.len()
            )));
        }
        let assignment = self.components();
        if c >= assignment.k() {
            return Err(Error::ComponentNotFound(c));
        }
        let zero = delta.iter().all(|&x| x == 0.0);
        for v in assignment.members(c) {
            if zero {
                self.offsets.remove(&v);
            } else {
                self.offsets.insert(v, delta.to_vec());
            }
        }
        Ok(())
    }

    pub fn set_constraints(&mut self, cs: ConstraintSet) -> Result<()> {
        cs.validate(self.len())?;
        self.constraints = cs;
        Ok(())
    }

    pub fn check_constraints(&self, cs: &ConstraintSet) -> Result<ViolationReport> {
        cs.validate(self.len())?;
        Ok(cs.check(&self.components()))
    }

    /// Violations of the stored constraints under the current cuts.
    pub fn violations(&self) -> ViolationReport {
        self.constraints.check(&self.components())
    }

    fn component_nodes(&self, c: usize) -> Result<Vec<usize>> {
        let assignment = self.components();
        if c >= assignment.k() {
            return Err(Error::ComponentNotFound(c));
        }
        let nodes = assignment.members(c);
        if nodes.len() < 2 {
            return Err(Error::SingletonComponent(c));
        }
        Ok(nodes)
    }

    fn child_constraints(&self, nodes: &[usize]) -> ConstraintSet {
        self.constraints.remap(|v| nodes.binary_search(&v).ok())
    }

    /// Re-embed component `c` from the induced sub-tree and the matching
    /// block of the tree distance matrix. Sigma and potentials carry over.
    /// The child gets id 0 until a workbench assigns one.
    pub fn divide(&self, c: usize) -> Result<Session> {
        let nodes = self.component_nodes(c)?;
        let tree = self.tree.induced(&nodes)?;
        let dist = self.dist.submatrix(&nodes);
        let embedding = embed(&dist, tree.potentials(), self.dim, self.method)?;
        Ok(Session {
            id: 0,
            dataset: self.dataset.clone(),
            node_ids: nodes.iter().map(|&v| self.node_ids[v]).collect(),
            metric: self.metric,
            dim: self.dim,
            method: self.method,
            tree: Arc::new(tree),
            dist: Arc::new(dist),
            embedding: Arc::new(embedding),
            cuts: BTreeSet::new(),
            offsets: BTreeMap::new(),
            children: Vec::new(),
            origin: Some(Origin {
                parent: self.id,
                component: c,
                kind: ChildKind::Divide,
            }),
            constraints: self.child_constraints(&nodes),
        })
    }

    /// Rebuild component `c` from its raw points in `root` with a new
    /// sigma, using the session's metric. The child gets id 0 until a
    /// workbench assigns one.
    pub fn conquer(&self, c: usize, sigma: Sigma, root: &Dataset) -> Result<Session> {
        if root.len() != self.dataset.n || root.dim() != self.dataset.d {
            return Err(Error::InvalidArgument(
                "dataset does not match the session's dataset".into(),
            ));
        }
        let nodes = self.component_nodes(c)?;
        let node_ids: Vec<usize> = nodes.iter().map(|&v| self.node_ids[v]).collect();
        let subset = root.subset(&node_ids)?;
        let pipeline = Pipeline::run(&subset, self.metric, sigma, self.dim, self.method)?;
        Ok(pipeline.into_session(
            0,
            self.dataset.clone(),
            node_ids,
            Some(Origin {
                parent: self.id,
                component: c,
                kind: ChildKind::Conquer,
            }),
            self.child_constraints(&nodes),
        ))
    }
}

struct Pipeline {
    metric: Metric,
    dim: usize,
    method: MdsMethod,
    tree: InTree,
    dist: TreeDistanceMatrix,
    embedding: Embedding,
}

impl Pipeline {
    fn run(
        ds: &Dataset,
        metric: Metric,
        sigma: Sigma,
        dim: usize,
        method: MdsMethod,
    ) -> Result<Self> {
        check_dim(dim)?;
        let raw = distance_matrix(ds, metric)?;
        let sigma = sigma.resolve(&raw)?;
        let potentials = compute_potentials(&raw, sigma)?;
        let tree = build_in_tree(&raw, &potentials)?;
        drop(raw);
        let dist = tree.to_undirected().tree_distances();
        let embedding = embed(&dist, tree.potentials(), dim, method)?;
        Ok(Self {
            metric,
            dim,
            method,
            tree,
            dist,
            embedding,
        })
    }

    fn into_session(
        self,
        id: SessionId,
        dataset: DatasetRef,
        node_ids: Vec<usize>,
        origin: Option<Origin>,
        constraints: ConstraintSet,
    ) -> Session {
        Session {
            id,
            dataset,
            node_ids,
            metric: self.metric,
            dim: self.dim,
            method: self.method,
            tree: Arc::new(self.tree),
            dist: Arc::new(self.dist),
            embedding: Arc::new(self.embedding),
            cuts: BTreeSet::new(),
            offsets: BTreeMap::new(),
            children: Vec::new(),
            origin,
            constraints,
        }
    }
}
