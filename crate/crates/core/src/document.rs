//! Self-describing JSON form of a session.
//!
//! The document holds everything needed to restore a session except the
//! tree distance matrix, which is recomputed from the edges on load.
//! [`SessionDocument::to_bytes`] is the single serializer shared by every
//! writer, so equal sessions always produce equal bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dataset::Metric;
use crate::error::{Error, Result};
use crate::intree::{InTree, PotentialVector};
use crate::mds::{Coords, Embedding, MdsMethod};
use crate::session::{check_dim, ChildLink, ConstraintSet, DatasetRef, Origin, Session, SessionId};
use crate::tree::RootedTree;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub child: usize,
    pub parent: usize,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OffsetRecord {
    pub node: usize,
    pub delta: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionDocument {
    pub format_version: u32,
    pub id: SessionId,
    pub origin: Option<Origin>,
    pub dataset: DatasetRef,
    pub node_ids: Vec<usize>,
    pub sigma: f64,
    pub metric: Metric,
    pub dim: usize,
    pub method: MdsMethod,
    pub root: usize,
    pub edges: Vec<EdgeRecord>,
    pub potentials: Vec<f64>,
    pub coords: Vec<Vec<f64>>,
    pub potential_axis: Vec<f64>,
    pub stress: f64,
    pub cuts: Vec<usize>,
    pub offsets: Vec<OffsetRecord>,
    pub constraints: ConstraintSet,
    pub children: Vec<ChildLink>,
}

impl SessionDocument {
    /// Pretty-printed JSON with a trailing newline.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("documents always serialize");
        out.push(b'\n');
        out
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self> {
        let doc: SessionDocument = serde_json::from_slice(bytes)?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Document(format!(
                "unsupported format version {} (expected {FORMAT_VERSION})",
                doc.format_version
            )));
        }
        Ok(doc)
    }

    pub fn len(&self) -> usize {
        self.node_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_ids.is_empty()
    }

    /// Parent pointers and edge lengths indexed by node, checked for shape.
    pub(crate) fn parents(&self) -> Result<(Vec<Option<usize>>, Vec<f64>)> {
        let n = self.len();
        if self.root >= n {
            return Err(Error::Document(format!("root {} out of range", self.root)));
        }
        let mut parent = vec![None; n];
        let mut length = vec![0.0; n];
        for e in &self.edges {
            if e.child >= n || e.parent >= n {
                return Err(Error::Document(format!(
                    "edge {} -> {} out of range",
                    e.child, e.parent
                )));
            }
            if parent[e.child].replace(e.parent).is_some() {
                return Err(Error::Document(format!("node {} has two parents", e.child)));
            }
            length[e.child] = e.length;
        }
        if parent[self.root].is_some() {
            return Err(Error::Document("root has a parent".into()));
        }
        Ok((parent, length))
    }
}

impl Session {
    pub fn to_document(&self) -> SessionDocument {
        SessionDocument {
            format_version: FORMAT_VERSION,
            id: self.id,
            origin: self.origin.clone(),
            dataset: self.dataset.clone(),
            node_ids: self.node_ids.clone(),
            sigma: self.sigma(),
            metric: self.metric,
            dim: self.dim,
            method: self.method,
            root: self.tree.root(),
            edges: self
                .tree
                .edges()
                .map(|(child, parent, length)| EdgeRecord {
                    child,
                    parent,
                    length,
                })
                .collect(),
            potentials: self.potentials().values().to_vec(),
            coords: self.embedding.coords.to_rows(),
            potential_axis: self.embedding.potential_axis.clone(),
            stress: self.embedding.stress,
            cuts: self.cuts.iter().copied().collect(),
            offsets: self
                .offsets
                .iter()
                .map(|(&node, delta)| OffsetRecord {
                    node,
                    delta: delta.clone(),
                })
                .collect(),
            constraints: self.constraints.clone(),
            children: self.children.clone(),
        }
    }

    /// Rebuild a session from its document, recomputing tree distances.
    pub fn from_document(doc: &SessionDocument) -> Result<Session> {
        let n = doc.len();
        if n == 0 {
            return Err(Error::Document("session has no nodes".into()));
        }
        check_dim(doc.dim)?;
        if doc.node_ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Document(
                "node ids must be strictly ascending".into(),
            ));
        }
        if doc.potentials.len() != n || doc.potential_axis.len() != n || doc.coords.len() != n {
            return Err(Error::Document(
                "per-node arrays disagree on the node count".into(),
            ));
        }
        let (parent, length) = doc.parents()?;
        let tree =
            RootedTree::from_parents(parent, length).map_err(|e| Error::Document(e.to_string()))?;
        let tree = InTree::from_parts(
            tree,
            PotentialVector::new(doc.potentials.clone(), doc.sigma)?,
        )?;
        let dist = tree.to_undirected().tree_distances();
        let coords = Coords::from_rows(&doc.coords, doc.dim)?;

        let mut cuts = BTreeSet::new();
        for &e in &doc.cuts {
            if e >= n || tree.parent(e).is_none() {
                return Err(Error::Document(format!("cut {e} is not an edge")));
            }
            cuts.insert(e);
        }
        let mut offsets = BTreeMap::new();
        for o in &doc.offsets {
            if o.node >= n || o.delta.len() != doc.dim {
                return Err(Error::Document(format!("bad offset for node {}", o.node)));
            }
            offsets.insert(o.node, o.delta.clone());
        }
        doc.constraints.validate(n)?;

        Ok(Session {
            id: doc.id,
            dataset: doc.dataset.clone(),
            node_ids: doc.node_ids.clone(),
            metric: doc.metric,
            dim: doc.dim,
            method: doc.method,
            tree: Arc::new(tree),
            dist: Arc::new(dist),
            embedding: Arc::new(Embedding {
                coords,
                potential_axis: doc.potential_axis.clone(),
                stress: doc.stress,
            }),
            cuts,
            offsets,
            children: doc.children.clone(),
            origin: doc.origin.clone(),
            constraints: doc.constraints.clone(),
        })
    }
}
