use std::collections::VecDeque;

use isotransport::counterexample::{counterexample_build, counterexample_report};
use isotransport::lazy::DEFAULT_VERTEX_BUDGET;

/// Neighbours of core state `(f, z)`, `1 ≤ z ≤ n`, as `(f, z)` pairs; `z` may
/// leave `[1, n]`.
fn states_around(f: usize, z: usize) -> [(usize, usize); 3] {
    [(f ^ (1 << (z - 1)), z), (f, z + 1), (f, z - 1)]
}

/// Boundary and inradius of a core subset given as a membership predicate,
/// recomputed from the generators.
fn oracle(n: usize, inside: impl Fn(usize) -> bool) -> (usize, u32) {
    let idx = |f: usize, z: usize| f * n + z - 1;
    let member = |f: usize, z: usize| (1..=n).contains(&z) && inside(idx(f, z));
    let total = n << n;
    let mut dist = vec![u32::MAX; total];
    let mut queue = VecDeque::new();
    let mut boundary = 0;
    for f in 0..1usize << n {
        for z in 1..=n {
            if !member(f, z) {
                continue;
            }
            let outside = states_around(f, z).iter().filter(|&&(g, y)| !member(g, y)).count();
            boundary += outside;
            if outside > 0 {
                dist[idx(f, z)] = 0;
                queue.push_back((f, z));
            }
        }
    }
    let mut max = 0;
    while let Some((f, z)) = queue.pop_front() {
        let d = dist[idx(f, z)];
        max = max.max(d);
        for (g, y) in states_around(f, z) {
            if member(g, y) && dist[idx(g, y)] == u32::MAX {
                dist[idx(g, y)] = d + 1;
                queue.push_back((g, y));
            }
        }
    }
    (boundary, max)
}

#[test]
fn small_instances_match_oracle() {
    for (n, j) in [(6, 2), (6, 3), (8, 4), (10, 5)] {
        let c = counterexample_build(n, j, DEFAULT_VERTEX_BUDGET).unwrap();
        let r = counterexample_report(&c, 1.0, 1.0).unwrap();
        assert_eq!(r.log.translates, (n / j) << (n - j));
        assert_eq!((r.full_size, r.full_boundary), (n << n, 2 << n));
        let (b, inrad) = oracle(n, |v| c.reduced.contains(v));
        assert_eq!((r.boundary, r.inradius), (b, inrad), "n={n} j={j}");
        let (fb, finrad) = oracle(n, |_| true);
        assert_eq!((r.full_boundary, r.full_inradius), (fb, finrad));
        assert!(c.reduced.is_subset_of(&c.full));
        assert_eq!(r.size, c.reduced.len());
        assert_eq!(r.size + c.log.removed, n << n);
        assert!(r.passes(), "n={n} j={j}: {:#?}", r.verdicts);
    }
}

#[test]
fn radial_ratio_uses_counts() {
    let c = counterexample_build(10, 5, DEFAULT_VERTEX_BUDGET).unwrap();
    let r = counterexample_report(&c, 2.0, 1.5).unwrap();
    let want = 2.0 * r.boundary as f64 * (1.0 + r.inradius as f64).powf(1.5) / r.size as f64;
    assert!((r.radial.ratio - want).abs() < 1e-12 * want);
    assert!((r.comparison - 25f64.powf(1.5) * 2.0 / 10.0).abs() < 1e-12);
}

#[test]
fn rejects_bad_parameters() {
    assert!(counterexample_build(10, 3, DEFAULT_VERTEX_BUDGET).is_err());
    assert!(counterexample_build(10, 0, DEFAULT_VERTEX_BUDGET).is_err());
    assert!(counterexample_build(12, 4, 1000).is_err());
}
