use std::collections::{BTreeSet, HashSet};

use isotransport::graph::{bfs_distances, boundary_size, edge_boundary, generate_family, induced_subgraph, random_regular, tree_ray_graph, tree_ray_regularized, UNREACHED};
use isotransport::lazy::{lamplighter_window, materialize_ball, LampLabel, Lamplighter, LamplighterBox, LazyGraph, DEFAULT_VERTEX_BUDGET};
use isotransport::{Adjacency, Family, FiniteGraph, VertexSubset};
use proptest::prelude::*;

fn fam(s: &str) -> FiniteGraph {
    generate_family(&s.parse().unwrap()).unwrap()
}

/// Brute-force boundary count straight from the edge list.
fn boundary_oracle(g: &FiniteGraph, members: &HashSet<usize>) -> usize {
    g.edges().iter().filter(|(a, b)| members.contains(a) != members.contains(b)).count()
}

#[test]
fn family_sizes() {
    let cases: &[(&str, usize, usize)] = &[
        ("cycle:4", 4, 4),
        ("cycle:9", 9, 9),
        ("path:5", 5, 4),
        ("complete:5", 5, 10),
        ("hypercube:3", 8, 12),
        ("hypercube:4", 16, 32),
        ("grid:3x4", 12, 17),
        ("grid:2x2x2", 8, 12),
        ("petersen", 10, 15),
        ("lamplighter-window:3", 24, 28),
    ];
    for &(name, v, e) in cases {
        let g = fam(name);
        assert_eq!((g.vertex_count(), g.edge_count()), (v, e), "{name}");
        assert!(g.is_connected(), "{name}");
        g.validate().unwrap();
    }
}

#[test]
fn family_names_round_trip() {
    for name in ["cycle:6", "complete:4", "grid:3x5", "petersen", "random-regular:n=8,d=3,seed=2", "tree-ray:4"] {
        let f: Family = name.parse().unwrap();
        assert_eq!(f.to_string(), name);
    }
    assert!("random-regular:n=8,d=3".parse::<Family>().is_err());
    assert!("moebius:5".parse::<Family>().is_err());
    assert!(generate_family(&Family::Cycle(2)).is_err());
}

#[test]
fn petersen_structure() {
    let g = fam("petersen");
    assert_eq!(g.regular_degree(), Some(3));
    for v in 0..10 {
        let d = bfs_distances(&g, &[v], None);
        assert_eq!(*d.iter().max().unwrap(), 2);
    }
    // girth 5: no triangles, no 4-cycles
    for v in 0..10 {
        for &a in g.neighbors(v) {
            for &b in g.neighbors(v) {
                if a < b {
                    assert!(g.edge_id(a, b).is_none());
                    let common = g.neighbors(a).iter().filter(|x| g.neighbors(b).contains(x)).count();
                    assert_eq!(common, 1);
                }
            }
        }
    }
}

#[test]
fn random_regular_is_seeded() {
    let a = random_regular(10, 3, 3).unwrap();
    let b = random_regular(10, 3, 3).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.regular_degree(), Some(3));
    assert!(a.is_connected());
    assert!(random_regular(7, 3, 0).is_err());
}

#[test]
fn lamplighter_window_counts() {
    for n in [1usize, 3, 10] {
        let w = lamplighter_window(n, DEFAULT_VERTEX_BUDGET).unwrap();
        assert_eq!(w.core.len(), n << n);
        assert_eq!(boundary_size(&w.graph, &w.core), 2 << n);
        for v in w.core.iter() {
            assert_eq!(w.graph.degree(v), 3);
        }
        let bx = LamplighterBox::new(n, DEFAULT_VERTEX_BUDGET).unwrap();
        assert_eq!(bx.core_len(), n << n);
        let core = VertexSubset::from_members(bx.vertex_count(), 0..bx.core_len()).unwrap();
        assert_eq!(boundary_size(&bx, &core), 2 << n);
    }
    assert!(lamplighter_window(12, 1000).is_err());
}

#[test]
fn lamplighter_window_labels_match_generators() {
    let w = lamplighter_window(4, DEFAULT_VERTEX_BUDGET).unwrap();
    let index = w.label_index();
    for v in w.core.iter() {
        let want: BTreeSet<usize> = Lamplighter.neighbors(&w.labels[v]).iter().map(|l| index[l]).collect();
        let got: BTreeSet<usize> = w.graph.neighbors(v).iter().copied().collect();
        assert_eq!(got, want);
    }
}

#[test]
fn lamplighter_balls() {
    let id = LampLabel::identity();
    let sizes: Vec<usize> = (0..=4).map(|r| materialize_ball(&Lamplighter, &id, r, DEFAULT_VERTEX_BUDGET).unwrap().core.len()).collect();
    assert_eq!(&sizes[..3], &[1, 4, 10]);
    assert!(sizes.windows(2).all(|w| w[0] < w[1]));
    let w = materialize_ball(&Lamplighter, &id, 3, DEFAULT_VERTEX_BUDGET).unwrap();
    assert_eq!(w.layers.iter().sum::<usize>(), w.core.len());
    assert!(materialize_ball(&Lamplighter, &id, 10, 50).is_err());
}

#[test]
fn cycle_arc_boundary() {
    let g = fam("cycle:8");
    for k in 1..8 {
        let s = VertexSubset::from_members(8, 0..k).unwrap();
        assert_eq!(boundary_size(&g, &s), 2);
        assert_eq!(edge_boundary(&g, &s).len(), 2);
    }
    let alternate = VertexSubset::from_members(8, [0, 2, 4, 6]).unwrap();
    assert_eq!(boundary_size(&g, &alternate), 8);
}

#[test]
fn tree_ray_subtrees_have_one_boundary_edge() {
    let t = tree_ray_graph(6, 2).unwrap();
    assert!(t.graph.is_connected());
    for (i, s) in t.subtrees.iter().enumerate() {
        assert_eq!(s.len(), (1 << (i + 1)) - 1);
        assert_eq!(boundary_size(&t.graph, s), 1);
    }
    let r = tree_ray_regularized(4).unwrap();
    assert!(r.is_connected());
}

#[test]
fn induced_subgraph_example() {
    let g = fam("complete:5");
    let s = VertexSubset::from_members(5, [1, 3, 4]).unwrap();
    let (h, map) = induced_subgraph(&g, &s).unwrap();
    assert_eq!(map, vec![1, 3, 4]);
    assert_eq!((h.vertex_count(), h.edge_count()), (3, 3));
}

#[test]
fn bfs_respects_allowed_set() {
    let g = fam("path:6");
    let allowed = VertexSubset::from_members(6, [0, 1, 2, 4, 5]).unwrap();
    let d = bfs_distances(&g, &[0], Some(&allowed));
    assert_eq!(&d[..3], &[0, 1, 2]);
    assert_eq!(d[4], UNREACHED);
}

fn arb_graph() -> impl Strategy<Value = FiniteGraph> {
    (2usize..12).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..3 * n).prop_map(move |pairs| {
            let mut edges: Vec<(usize, usize)> = pairs.into_iter().filter(|(a, b)| a != b).map(|(a, b)| (a.min(b), a.max(b))).collect();
            edges.sort_unstable();
            edges.dedup();
            FiniteGraph::from_edges(n, &edges).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn degree_sum_splits_into_inner_and_boundary(g in arb_graph(), mask in any::<u64>()) {
        let n = g.vertex_count();
        let set = VertexSubset::from_mask(n, mask & ((1u64 << n) - 1));
        prop_assume!(!set.is_empty());
        let members: HashSet<usize> = set.iter().collect();
        let b = boundary_size(&g, &set);
        prop_assert_eq!(b, boundary_oracle(&g, &members));
        let (h, _) = induced_subgraph(&g, &set).unwrap();
        let deg: usize = set.iter().map(|v| g.degree(v)).sum();
        prop_assert_eq!(deg, 2 * h.edge_count() + b);
        prop_assert_eq!(b, boundary_size(&g, &set.complement()));
    }

    #[test]
    fn text_round_trip(g in arb_graph()) {
        prop_assert_eq!(FiniteGraph::from_text(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn lamp_label_codec(lamps in proptest::collection::btree_set(-1000i64..1000, 0..20), pos in -1000i64..1000) {
        let x = LampLabel { lamps: lamps.into_iter().collect(), pos };
        let bytes = Lamplighter.encode(&x);
        prop_assert_eq!(Lamplighter.decode(&bytes).unwrap(), x.clone());
        prop_assert!(Lamplighter.decode(&bytes[..bytes.len() - 1]).is_err());
        // generators are involutions up to inverse
        prop_assert_eq!(x.toggled().toggled(), x.clone());
        prop_assert_eq!(x.moved(1).moved(-1), x.clone());
        for y in Lamplighter.neighbors(&x) {
            prop_assert!(Lamplighter.neighbors(&y).contains(&x));
        }
    }
}
