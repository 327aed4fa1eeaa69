use std::collections::BTreeMap;
use std::sync::Arc;

use super::{
    ChildLink, ClusterAssignment, Session, SessionId, SessionParams, Sigma, ViolationReport,
};
use crate::dataset::{content_id, parse_csv, AttrKind, Dataset};
use crate::error::{Error, Result};

/// In-memory store of datasets and sessions. Session ids are handed out
/// sequentially from 1.
#[derive(Clone, Debug)]
pub struct Workbench {
    datasets: BTreeMap<String, Arc<Dataset>>,
    sessions: BTreeMap<SessionId, Session>,
    next_id: SessionId,
}

impl Default for Workbench {
    fn default() -> Self {
        Self {
            datasets: BTreeMap::new(),
            sessions: BTreeMap::new(),
            next_id: 1,
        }
    }
}

impl Workbench {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parse and store a CSV dataset under its content id. Importing the
    /// same text twice yields the same id.
    pub fn import_csv(
        &mut self,
        text: &str,
        kind: AttrKind,
        label_column: Option<usize>,
        name: &str,
    ) -> Result<String> {
        let id = content_id(text, kind, label_column);
        if !self.datasets.contains_key(&id) {
            let ds = parse_csv(text, kind, label_column)?.with_name(name);
            self.datasets.insert(id.clone(), Arc::new(ds));
        }
        Ok(id)
    }

    pub fn insert_dataset(&mut self, id: impl Into<String>, ds: Dataset) -> Arc<Dataset> {
        let ds = Arc::new(ds);
        self.datasets.insert(id.into(), Arc::clone(&ds));
        ds
    }

    pub fn dataset(&self, id: &str) -> Result<&Arc<Dataset>> {
        self.datasets
            .get(id)
            .ok_or_else(|| Error::DatasetNotFound(id.to_string()))
    }

    pub fn datasets(&self) -> impl Iterator<Item = (&String, &Arc<Dataset>)> {
        self.datasets.iter()
    }

    pub fn session(&self, id: SessionId) -> Result<&Session> {
        self.sessions.get(&id).ok_or(Error::SessionNotFound(id))
    }

    pub fn session_mut(&mut self, id: SessionId) -> Result<&mut Session> {
        self.sessions.get_mut(&id).ok_or(Error::SessionNotFound(id))
    }

    pub fn sessions(&self) -> impl Iterator<Item = &Session> {
        self.sessions.values()
    }

    pub fn next_session_id(&self) -> SessionId {
        self.next_id
    }

    /// Store a session, replacing any with the same id.
    pub fn insert_session(&mut self, session: Session) {
        self.next_id = self.next_id.max(session.id + 1);
        self.sessions.insert(session.id, session);
    }

    /// Give a freshly built top-level session the next free id.
    pub fn stage_session(&self, mut session: Session) -> Session {
        session.id = self.next_id;
        session
    }

    pub fn create_session(
        &mut self,
        dataset_id: &str,
        params: &SessionParams,
    ) -> Result<SessionId> {
        let ds = self.dataset(dataset_id)?;
        let session = Session::create(self.next_id, dataset_id, ds, params)?;
        let id = session.id;
        self.insert_session(session);
        Ok(id)
    }

    /// Assign the next free id to a child built by [`Session::divide`] or
    /// [`Session::conquer`] and return it with an updated copy of its
    /// parent. Nothing is stored.
    pub fn stage_child(&self, mut child: Session) -> Result<(Session, Session)> {
        let origin = child
            .origin
            .clone()
            .ok_or_else(|| Error::InvalidArgument("session has no parent".into()))?;
        let mut parent = self.session(origin.parent)?.clone();
        child.id = self.next_id;
        parent.children.push(ChildLink {
            component: origin.component,
            session: child.id,
            kind: origin.kind,
            finalized: false,
        });
        Ok((parent, child))
    }

    fn commit_child(&mut self, child: Session) -> Result<SessionId> {
        let (parent, child) = self.stage_child(child)?;
        let id = child.id;
        self.insert_session(parent);
        self.insert_session(child);
        Ok(id)
    }

    pub fn divide(&mut self, parent: SessionId, component: usize) -> Result<SessionId> {
        let child = self.session(parent)?.divide(component)?;
        self.commit_child(child)
    }

    pub fn conquer(
        &mut self,
        parent: SessionId,
        component: usize,
        sigma: Sigma,
    ) -> Result<SessionId> {
        let session = self.session(parent)?;
        let root = self.dataset(&session.dataset.id)?;
        let child = session.conquer(component, sigma, root)?;
        self.commit_child(child)
    }

    /// Copy of `parent` with `child` marked finalized. Fails when the child
    /// shares nodes with an already finalized sibling.
    pub fn stage_finalize(&self, parent: SessionId, child: SessionId) -> Result<Session> {
        let mut updated = self.session(parent)?.clone();
        let pos = updated
            .children
            .iter()
            .position(|link| link.session == child)
            .ok_or(Error::NotAChild { parent, child })?;
        let nodes = self.session(child)?.node_ids();
        for link in updated
            .children
            .iter()
            .filter(|l| l.finalized && l.session != child)
        {
            if intersects(nodes, self.session(link.session)?.node_ids()) {
                return Err(Error::OverlappingChildren(parent));
            }
        }
        updated.children[pos].finalized = true;
        Ok(updated)
    }

    pub fn finalize(&mut self, parent: SessionId, child: SessionId) -> Result<()> {
        let updated = self.stage_finalize(parent, child)?;
        self.insert_session(updated);
        Ok(())
    }

    /// The session's components with every finalized child's own merged
    /// result substituted for the nodes it covers. Ids are renumbered
    /// densely by smallest node.
    pub fn merged_assignment(&self, id: SessionId) -> Result<ClusterAssignment> {
        let session = self.session(id)?;
        let base = session.components();
        let mut keys: Vec<(usize, usize)> = base.component_of().iter().map(|&c| (0, c)).collect();
        let mut covered = vec![false; session.len()];
        for (j, link) in session
            .children
            .iter()
            .enumerate()
            .filter(|(_, l)| l.finalized)
        {
            let child = self.session(link.session)?;
            let merged = self.merged_assignment(link.session)?;
            for (k, &root_node) in child.node_ids().iter().enumerate() {
                let v = session.local_index(root_node).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "child session {} covers node {root_node} outside its parent",
                        link.session
                    ))
                })?;
                if covered[v] {
                    return Err(Error::OverlappingChildren(id));
                }
                covered[v] = true;
                keys[v] = (j + 1, merged.get(k));
            }
        }
        Ok(ClusterAssignment::from_keys(&keys))
    }

    /// Stored constraints checked against the merged assignment.
    pub fn merged_violations(&self, id: SessionId) -> Result<ViolationReport> {
        let merged = self.merged_assignment(id)?;
        Ok(self.session(id)?.constraints.check(&merged))
    }

    /// Ground-truth labels of the session's nodes, when the dataset has
    /// them.
    pub fn truth(&self, id: SessionId) -> Result<Option<Vec<u32>>> {
        let session = self.session(id)?;
        let ds = self.dataset(&session.dataset.id)?;
        Ok(ds
            .labels()
            .map(|labels| session.node_ids.iter().map(|&v| labels[v]).collect()))
    }

    /// Majority-class error rate of the merged assignment.
    pub fn error_rate(&self, id: SessionId) -> Result<f64> {
        let truth = self.truth(id)?.ok_or(Error::MissingLabels)?;
        super::error_rate(&self.merged_assignment(id)?, &truth)
    }
}

fn intersects(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::session::ChildKind;

    const PAIRS: &str = "0,a\n0.1,a\n0.3,b\n10,c\n10.1,c\n10.4,d\n";

    fn bench() -> (Workbench, SessionId) {
        let mut wb = Workbench::new();
        let ds = wb
            .import_csv(PAIRS, AttrKind::Numeric, Some(1), "pairs")
            .unwrap();
        let params = SessionParams {
            sigma: Sigma::Value(1.0),
            ..Default::default()
        };
        let id = wb.create_session(&ds, &params).unwrap();
        (wb, id)
    }

    #[test]
    fn ids_are_sequential_and_imports_idempotent() {
        let (mut wb, id) = bench();
        assert_eq!(id, 1);
        let again = wb
            .import_csv(PAIRS, AttrKind::Numeric, Some(1), "other")
            .unwrap();
        assert_eq!(wb.datasets().count(), 1);
        assert_eq!(
            wb.create_session(&again, &SessionParams::default())
                .unwrap(),
            2
        );
        assert!(matches!(wb.session(9), Err(Error::SessionNotFound(9))));
        assert!(wb
            .create_session("nope", &SessionParams::default())
            .is_err());
    }

    #[test]
    fn merge_without_children_is_plain_components() {
        let (mut wb, id) = bench();
        wb.session_mut(id).unwrap().cut_longest(1).unwrap();
        assert_eq!(
            wb.merged_assignment(id).unwrap(),
            wb.session(id).unwrap().components()
        );
    }

    #[test]
    fn finalized_child_split_adds_a_component() {
        let (mut wb, id) = bench();
        wb.session_mut(id).unwrap().cut_longest(1).unwrap();
        let c = wb.session(id).unwrap().components().get(3);
        let child = wb.divide(id, c).unwrap();
        assert_eq!(
            wb.session(id).unwrap().children()[0].kind,
            ChildKind::Divide
        );
        wb.session_mut(child).unwrap().cut_longest(1).unwrap();
        assert_eq!(wb.merged_assignment(id).unwrap().k(), 2);
        wb.finalize(id, child).unwrap();
        let merged = wb.merged_assignment(id).unwrap();
        assert_eq!(merged.k(), 3);
        assert_eq!(merged.len(), 6);
        assert!(matches!(wb.finalize(id, 42), Err(Error::NotAChild { .. })));
    }

    #[test]
    fn overlapping_finalized_children_are_rejected() {
        let (mut wb, id) = bench();
        let a = wb.divide(id, 0).unwrap();
        let b = wb.conquer(id, 0, Sigma::Value(1.0)).unwrap();
        wb.finalize(id, a).unwrap();
        assert!(matches!(
            wb.finalize(id, b),
            Err(Error::OverlappingChildren(_))
        ));
    }

    #[test]
    fn error_rate_through_the_merge() {
        let (mut wb, id) = bench();
        // labels a a b | c c d: the two long-gap halves each hold one stray
        wb.session_mut(id).unwrap().cut_longest(1).unwrap();
        assert!((wb.error_rate(id).unwrap() - 2.0 / 6.0).abs() < 1e-15);
        assert_eq!(wb.truth(id).unwrap().unwrap(), vec![0, 0, 1, 2, 2, 3]);
    }
}
