use itmap_core::tree::{RootedTree, WeightedTree};
use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use proptest::prelude::*;
use proptest::sample::Index;

/// Random rooted tree: node `k` of a hidden ordering hangs off one of the
/// earlier nodes, then labels are shuffled.
fn random_tree(max_n: usize) -> impl Strategy<Value = RootedTree> {
    (1..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<Index>(), n),
            prop::collection::vec(0.01..10.0f64, n),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        )
            .prop_map(move |(picks, lens, perm)| {
                let mut parent = vec![None; n];
                let mut length = vec![0.0; n];
                for k in 1..n {
                    let up = picks[k].index(k);
                    parent[perm[k]] = Some(perm[up]);
                    length[perm[k]] = lens[k];
                }
                RootedTree::from_parents(parent, length).unwrap()
            })
    })
}

fn to_petgraph(t: &WeightedTree) -> UnGraph<(), f64> {
    let mut g = UnGraph::with_capacity(t.len(), t.edges().len());
    for _ in 0..t.len() {
        g.add_node(());
    }
    for &(u, v, len) in t.edges() {
        g.add_edge(NodeIndex::new(u), NodeIndex::new(v), len);
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn all_pairs_match_dijkstra(tree in random_tree(200)) {
        let t = tree.to_undirected();
        let d = t.tree_distances();
        let g = to_petgraph(&t);
        for s in 0..t.len() {
            let oracle = dijkstra(&g, NodeIndex::new(s), None, |e| *e.weight());
            for j in 0..t.len() {
                let want = oracle[&NodeIndex::new(j)];
                prop_assert!((d.get(s, j) - want).abs() <= 1e-12 * want.max(1.0));
            }
        }
    }

    #[test]
    fn matrix_shape(tree in random_tree(60)) {
        let d = tree.to_undirected().tree_distances();
        for i in 0..d.len() {
            prop_assert_eq!(d.get(i, i), 0.0);
            for j in 0..d.len() {
                prop_assert_eq!(d.get(i, j), d.get(j, i));
                if i != j {
                    prop_assert!(d.get(i, j) > 0.0);
                }
            }
        }
    }

    #[test]
    fn paths_are_additive(tree in random_tree(60), a in any::<Index>(), b in any::<Index>()) {
        let t = tree.to_undirected();
        let d = t.tree_distances();
        let (i, j) = (a.index(t.len()), b.index(t.len()));
        let path = t.path(i, j).unwrap();
        prop_assert_eq!(path[0], i);
        prop_assert_eq!(*path.last().unwrap(), j);
        let mut reversed = t.path(j, i).unwrap();
        reversed.reverse();
        prop_assert_eq!(&reversed, &path);

        let mut sum = 0.0;
        let mut longest = 0.0f64;
        for w in path.windows(2) {
            let hop = d.get(w[0], w[1]);
            sum += hop;
            longest = longest.max(hop);
        }
        prop_assert!((sum - d.get(i, j)).abs() <= 1e-9 * (1.0 + sum));
        prop_assert!(d.get(i, j) >= longest);
        for &k in &path {
            prop_assert!((d.get(i, k) + d.get(k, j) - d.get(i, j)).abs() <= 1e-9 * (1.0 + sum));
        }
    }

    #[test]
    fn triangle_inequality(tree in random_tree(40), a in any::<Index>(), b in any::<Index>(), c in any::<Index>()) {
        let d = tree.to_undirected().tree_distances();
        let n = d.len();
        let (i, j, k) = (a.index(n), b.index(n), c.index(n));
        prop_assert!(d.get(i, j) <= d.get(i, k) + d.get(k, j) + 1e-9);
    }

    #[test]
    fn reroot_keeps_edges_and_points_home(tree in random_tree(60), pick in any::<Index>()) {
        let r = pick.index(tree.len());
        let rerooted = tree.reroot(r).unwrap();
        prop_assert_eq!(rerooted.root(), r);
        let key = |t: &RootedTree| {
            let mut e: Vec<(usize, usize, u64)> = t
                .edges()
                .map(|(c, p, len)| (c.min(p), c.max(p), len.to_bits()))
                .collect();
            e.sort_unstable();
            e
        };
        prop_assert_eq!(key(&rerooted), key(&tree));
        for v in 0..tree.len() {
            prop_assert_eq!(*rerooted.chain_to_root(v).last().unwrap(), r);
        }
        prop_assert_eq!(&rerooted.reroot(tree.root()).unwrap(), &tree);
    }
}
