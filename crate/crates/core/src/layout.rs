//! Display-ready view of a session: positions, edges with their cut state
//! and component membership.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::document::SessionDocument;
use crate::error::Result;
use crate::session::{components_of, Session, SessionId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutNode {
    /// Session-local index.
    pub id: usize,
    /// Index in the root dataset.
    pub node_id: usize,
    pub coords: Vec<f64>,
    pub offset: Vec<f64>,
    /// `coords + offset`.
    pub position: Vec<f64>,
    pub potential: f64,
    pub component: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutEdge {
    /// Edge id, equal to the child node.
    pub id: usize,
    pub parent: usize,
    pub length: f64,
    pub cut: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub session: SessionId,
    pub dim: usize,
    pub sigma: f64,
    pub root: usize,
    pub stress: f64,
    pub k: usize,
    pub nodes: Vec<LayoutNode>,
    pub edges: Vec<LayoutEdge>,
    pub cuts: Vec<usize>,
}

impl Layout {
    pub fn from_document(doc: &SessionDocument) -> Result<Layout> {
        let n = doc.len();
        doc.parents()?;
        let cuts: BTreeSet<usize> = doc.cuts.iter().copied().collect();
        let assignment = components_of(n, doc.edges.iter().map(|e| (e.child, e.parent)), &cuts);
        let mut offsets = vec![vec![0.0; doc.dim]; n];
        for o in &doc.offsets {
            if let Some(slot) = offsets.get_mut(o.node) {
                slot.clone_from(&o.delta);
            }
        }
        let nodes = (0..n)
            .map(|v| {
                let coords = doc.coords[v].clone();
                let position = coords.iter().zip(&offsets[v]).map(|(c, o)| c + o).collect();
                LayoutNode {
                    id: v,
                    node_id: doc.node_ids[v],
                    coords,
                    offset: offsets[v].clone(),
                    position,
                    potential: doc.potential_axis[v],
                    component: assignment.get(v),
                }
            })
            .collect();
        Ok(Layout {
            session: doc.id,
            dim: doc.dim,
            sigma: doc.sigma,
            root: doc.root,
            stress: doc.stress,
            k: assignment.k(),
            nodes,
            edges: doc
                .edges
                .iter()
                .map(|e| LayoutEdge {
                    id: e.child,
                    parent: e.parent,
                    length: e.length,
                    cut: cuts.contains(&e.child),
                })
                .collect(),
            cuts: doc.cuts.clone(),
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("layouts always serialize");
        out.push(b'\n');
        out
    }
}

impl Session {
    pub fn layout(&self) -> Layout {
        Layout::from_document(&self.to_document()).expect("a live session has a valid document")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{parse_csv, AttrKind};
    use crate::session::{ClickSpace, SessionParams, Sigma};

    #[test]
    fn layout_matches_session_state() {
        let ds = parse_csv("0\n0.1\n10\n10.1", AttrKind::Numeric, None).unwrap();
        let params = SessionParams {
            sigma: Sigma::Value(1.0),
            ..Default::default()
        };
        let mut s = Session::create(1, "x", &ds, &params).unwrap();
        s.cut_longest(1).unwrap();
        s.set_component_offset(1, &[3.0]).unwrap();
        let layout = s.layout();
        assert_eq!(layout.k, 2);
        assert_eq!(layout.edges.len(), 3);
        assert_eq!(layout.edges.iter().filter(|e| e.cut).count(), 1);
        for node in &layout.nodes {
            let mut expected = s.position(node.id, ClickSpace::R);
            assert_eq!(node.position, expected);
            expected.push(node.potential);
            assert_eq!(expected, s.position(node.id, ClickSpace::Rp));
            assert_eq!(node.component, s.components().get(node.id));
        }
    }
}
