use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ClusterAssignment;
use crate::error::{Error, Result};

/// Pairwise link constraints and partial class labels over session-local
/// node indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSet {
    #[serde(default)]
    pub must_link: Vec<(usize, usize)>,
    #[serde(default)]
    pub cannot_link: Vec<(usize, usize)>,
    #[serde(default)]
    pub labels: BTreeMap<usize, u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedComponent {
    pub component: usize,
    /// Distinct classes among the labelled members, ascending.
    pub classes: Vec<u32>,
    pub labelled_nodes: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationReport {
    /// Must-link pairs that ended up in different components.
    pub must_link: Vec<(usize, usize)>,
    /// Cannot-link pairs that share a component.
    pub cannot_link: Vec<(usize, usize)>,
    pub mixed_components: Vec<MixedComponent>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn count(&self) -> usize {
        self.must_link.len() + self.cannot_link.len() + self.mixed_components.len()
    }
}

fn unordered((a, b): (usize, usize)) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl ConstraintSet {
    pub fn is_empty(&self) -> bool {
        self.must_link.is_empty() && self.cannot_link.is_empty() && self.labels.is_empty()
    }

    /// Every node below `n`, no self-pair in `cannot_link`, and no pair in
    /// both lists.
    pub fn validate(&self, n: usize) -> Result<()> {
        let nodes = self
            .must_link
            .iter()
            .chain(&self.cannot_link)
            .flat_map(|&(a, b)| [a, b])
            .chain(self.labels.keys().copied());
        for node in nodes {
            if node >= n {
                return Err(Error::NodeOutOfRange { node, n });
            }
        }
        if let Some(&(a, _)) = self.cannot_link.iter().find(|(a, b)| a == b) {
            return Err(Error::InvalidConstraint(format!(
                "node {a} cannot be separated from itself"
            )));
        }
        let must: BTreeSet<_> = self.must_link.iter().map(|&p| unordered(p)).collect();
        if let Some(&(a, b)) = self
            .cannot_link
            .iter()
            .find(|&&p| must.contains(&unordered(p)))
        {
            return Err(Error::InvalidConstraint(format!(
                "pair ({a}, {b}) is both must-link and cannot-link"
            )));
        }
        Ok(())
    }

    pub fn check(&self, assignment: &ClusterAssignment) -> ViolationReport {
        let same = |&(a, b): &(usize, usize)| assignment.get(a) == assignment.get(b);
        let mut by_component: BTreeMap<usize, (BTreeSet<u32>, Vec<usize>)> = BTreeMap::new();
        for (&node, &class) in &self.labels {
            let entry = by_component.entry(assignment.get(node)).or_default();
            entry.0.insert(class);
            entry.1.push(node);
        }
        ViolationReport {
            must_link: self
                .must_link
                .iter()
                .filter(|p| !same(p))
                .copied()
                .collect(),
            cannot_link: self
                .cannot_link
                .iter()
                .filter(|p| same(p))
                .copied()
                .collect(),
            mixed_components: by_component
                .into_iter()
                .filter(|(_, (classes, _))| classes.len() >= 2)
                .map(|(component, (classes, labelled_nodes))| MixedComponent {
                    component,
                    classes: classes.into_iter().collect(),
                    labelled_nodes,
                })
                .collect(),
        }
    }

    /// Keep the constraints whose nodes all survive `map`, renamed.
    pub fn remap(&self, map: impl Fn(usize) -> Option<usize>) -> ConstraintSet {
        let pairs = |list: &[(usize, usize)]| {
            list.iter()
                .filter_map(|&(a, b)| Some((map(a)?, map(b)?)))
                .collect()
        };
        ConstraintSet {
            must_link: pairs(&self.must_link),
            cannot_link: pairs(&self.cannot_link),
            labels: self
                .labels
                .iter()
                .filter_map(|(&v, &c)| Some((map(v)?, c)))
                .collect(),
        }
    }
}
