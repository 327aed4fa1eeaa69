use std::collections::VecDeque;

use itmap_core::dataset::{AttrKind, Dataset};
use itmap_core::session::{ClickSpace, Session, SessionParams, Sigma, Workbench};
use itmap_core::{Error, MdsMethod};
use proptest::prelude::*;
use proptest::sample::Index;

fn session_strategy() -> impl Strategy<Value = Session> {
    (2usize..=30, 1usize..=3, 1usize..=3, 0.05..20.0f64).prop_flat_map(|(n, d, dim, sigma)| {
        prop::collection::vec(-5.0..5.0f64, n * d).prop_map(move |v| {
            let ds = Dataset::numeric("p", d, v, None).unwrap();
            let params = SessionParams {
                sigma: Sigma::Value(sigma),
                dim,
                ..Default::default()
            };
            Session::create(1, "p", &ds, &params).unwrap()
        })
    })
}

/// Breadth-first labelling over uncut edges, seeded from ascending nodes.
fn bfs_components(s: &Session) -> Vec<usize> {
    let n = s.len();
    let mut adj = vec![Vec::new(); n];
    for (c, p, _) in s.tree().edges() {
        if !s.cuts().contains(&c) {
            adj[c].push(p);
            adj[p].push(c);
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if label[w] == usize::MAX {
                    label[w] = next;
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    label
}

/// Closest uncut edge by a direct projection onto each segment.
fn brute_nearest(s: &Session, click: &[f64], space: ClickSpace) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (e, p, _) in s.tree().edges() {
        if s.cuts().contains(&e) {
            continue;
        }
        let (a, b) = (s.position(e, space), s.position(p, space));
        let dir: Vec<f64> = a.iter().zip(&b).map(|(x, y)| y - x).collect();
        let len2: f64 = dir.iter().map(|x| x * x).sum();
        let mut t = if len2 == 0.0 {
            0.0
        } else {
            dir.iter()
                .zip(click.iter().zip(&a))
                .map(|(d, (c, x))| d * (c - x))
                .sum::<f64>()
                / len2
        };
        t = t.clamp(0.0, 1.0);
        let dist: f64 = (0..a.len())
            .map(|k| (click[k] - (a[k] + t * dir[k])).powi(2))
            .sum();
        if best.map_or(true, |(_, bd)| dist < bd) {
            best = Some((e, dist));
        }
    }
    best.map(|(e, _)| e)
}

#[derive(Clone, Debug)]
enum Op {
    Cut(Index),
    Restore(Index),
    Offset(Index, Vec<f64>),
    Cross(Vec<f64>),
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        3 => any::<Index>().prop_map(Op::Cut),
        2 => any::<Index>().prop_map(Op::Restore),
        1 => (any::<Index>(), prop::collection::vec(-3.0..3.0f64, 3)).prop_map(|(i, d)| Op::Offset(i, d)),
        1 => prop::collection::vec(-5.0..5.0f64, 4).prop_map(Op::Cross),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn state_machine(mut s in session_strategy(), ops in prop::collection::vec(op(), 1..40)) {
        let edges: Vec<usize> = s.tree().edges().map(|(c, _, _)| c).collect();
        for op in ops {
            match op {
                Op::Cut(i) => {
                    let e = edges[i.index(edges.len())];
                    let before_assignment = s.components();
                    let before_layout = s.layout();
                    match s.cut_edge(e) {
                        Ok(a) => {
                            prop_assert_eq!(a.k(), before_assignment.k() + 1);
                            s.restore_edge(e).unwrap();
                            prop_assert_eq!(s.components(), before_assignment);
                            prop_assert_eq!(s.layout(), before_layout);
                            s.cut_edge(e).unwrap();
                        }
                        Err(Error::EdgeAlreadyCut(_)) => prop_assert!(s.cuts().contains(&e)),
                        Err(other) => return Err(TestCaseError::fail(other.to_string())),
                    }
                }
                Op::Restore(i) => {
                    let e = edges[i.index(edges.len())];
                    let was_cut = s.cuts().contains(&e);
                    let k = s.components().k();
                    match s.restore_edge(e) {
                        Ok(a) => { prop_assert!(was_cut); prop_assert_eq!(a.k(), k - 1); }
                        Err(Error::EdgeNotCut(_)) => prop_assert!(!was_cut),
                        Err(other) => return Err(TestCaseError::fail(other.to_string())),
                    }
                }
                Op::Offset(i, delta) => {
                    let before = s.components();
                    let c = i.index(before.k());
                    s.set_component_offset(c, &delta[..s.dim()]).unwrap();
                    prop_assert_eq!(s.components(), before);
                }
                Op::Cross(click) => {
                    let click = click[..s.dim() + 1].to_vec();
                    let expected = brute_nearest(&s, &click, ClickSpace::Rp);
                    match s.cross(&click, ClickSpace::Rp) {
                        Ok((e, _)) => prop_assert_eq!(Some(e), expected),
                        Err(Error::NoUncutEdges) => prop_assert_eq!(expected, None),
                        Err(other) => return Err(TestCaseError::fail(other.to_string())),
                    }
                }
            }
            let a = s.components();
            prop_assert_eq!(a.k(), s.cuts().len() + 1);
            let oracle = bfs_components(&s);
            prop_assert_eq!(a.component_of(), oracle.as_slice());
        }
    }

    #[test]
    fn nearest_edge_matches_brute_force(mut s in session_strategy(), cuts in prop::collection::vec(any::<Index>(), 0..5),
                                        click in prop::collection::vec(-6.0..6.0f64, 4), r_only in any::<bool>()) {
        let edges: Vec<usize> = s.tree().edges().map(|(c, _, _)| c).collect();
        for i in cuts {
            let _ = s.cut_edge(edges[i.index(edges.len())]);
        }
        let space = if r_only { ClickSpace::R } else { ClickSpace::Rp };
        let len = if r_only { s.dim() } else { s.dim() + 1 };
        let click = &click[..len];
        prop_assert_eq!(s.nearest_edge(click, space).ok(), brute_nearest(&s, click, space));
    }

    #[test]
    fn divide_copies_distances_exactly(mut s in session_strategy(), k in 0usize..4, pick in any::<Index>()) {
        let k = k.min(s.tree().edge_count());
        s.cut_longest(k).unwrap();
        let a = s.components();
        let c = pick.index(a.k());
        let nodes = a.members(c);
        match s.divide(c) {
            Ok(child) => {
                prop_assert_eq!(child.len(), nodes.len());
                for (i, &u) in nodes.iter().enumerate() {
                    for (j, &v) in nodes.iter().enumerate() {
                        prop_assert_eq!(child.tree_distances().get(i, j).to_bits(), s.tree_distances().get(u, v).to_bits());
                    }
                    prop_assert_eq!(child.potentials().values()[i].to_bits(), s.potentials().values()[u].to_bits());
                }
                prop_assert_eq!(child.tree().edge_count(), nodes.len() - 1);
            }
            Err(Error::SingletonComponent(_)) => prop_assert_eq!(nodes.len(), 1),
            Err(other) => return Err(TestCaseError::fail(other.to_string())),
        }
    }

    #[test]
    fn merge_partitions_the_root_set(n in 6usize..30, seed_values in prop::collection::vec(-5.0..5.0f64, 60),
                                     parent_cuts in 1usize..4, child_cuts in 1usize..3) {
        let mut wb = Workbench::new();
        let ds = Dataset::numeric("p", 2, seed_values[..2 * n].to_vec(), None).unwrap();
        let csv = itmap_core::dataset::to_csv(&ds);
        let id = wb.import_csv(&csv, AttrKind::Numeric, None, "p").unwrap();
        let root = wb.create_session(&id, &SessionParams { sigma: Sigma::Value(2.0), ..Default::default() }).unwrap();
        wb.session_mut(root).unwrap().cut_longest(parent_cuts.min(n - 1)).unwrap();
        let sizes = wb.session(root).unwrap().components().sizes();
        let mut expected_k = sizes.len();
        for (c, &size) in sizes.iter().enumerate() {
            if size < 2 {
                continue;
            }
            let child = wb.divide(root, c).unwrap();
            let cuts = child_cuts.min(size - 1);
            wb.session_mut(child).unwrap().cut_longest(cuts).unwrap();
            wb.finalize(root, child).unwrap();
            expected_k += cuts;
        }
        let merged = wb.merged_assignment(root).unwrap();
        prop_assert_eq!(merged.len(), n);
        prop_assert_eq!(merged.k(), expected_k);
        prop_assert_eq!(merged.sizes().iter().sum::<usize>(), n);
        prop_assert!(merged.sizes().iter().all(|&s| s > 0));
    }
}

#[test]
fn conquer_with_same_sigma_on_full_set_keeps_topology() {
    let ds = itmap_core::dataset::generate_gaussian_mixture(15, 3, 3, 6.0, 11).unwrap();
    let mut wb = Workbench::new();
    let id = wb
        .import_csv(
            &itmap_core::dataset::to_csv(&ds),
            AttrKind::Numeric,
            Some(0),
            "g",
        )
        .unwrap();
    for method in [MdsMethod::Classical, MdsMethod::Smacof] {
        let params = SessionParams {
            sigma: Sigma::Value(3.0),
            dim: 2,
            method,
            ..Default::default()
        };
        let root = wb.create_session(&id, &params).unwrap();
        let child = wb.conquer(root, 0, Sigma::Value(3.0)).unwrap();
        let (p, c) = (wb.session(root).unwrap(), wb.session(child).unwrap());
        assert_eq!(p.tree().rooted(), c.tree().rooted());
        assert_eq!(p.tree_distances(), c.tree_distances());
    }
}
