use isotransport::graph::generate_family;
use isotransport::operators::{
    compensated_sum, conjugate, divergence, divergence_laplacian, gradient, laplacian_apply, lp_norm, p_bar, pairing, plus_gradient, project_zero_sum, walk_apply, walk_push,
    Laplacian,
};
use isotransport::FiniteGraph;
use proptest::prelude::*;

fn fam(s: &str) -> FiniteGraph {
    generate_family(&s.parse().unwrap()).unwrap()
}

/// Signed incidence matrix, one row per edge id: `-1` at the low end, `+1` at the high end.
fn incidence(g: &FiniteGraph) -> Vec<Vec<f64>> {
    g.edges()
        .iter()
        .map(|&(a, b)| {
            let mut row = vec![0.0; g.vertex_count()];
            row[a] = -1.0;
            row[b] = 1.0;
            row
        })
        .collect()
}

fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

fn mat_t_vec(m: &[Vec<f64>], y: &[f64], cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; cols];
    for (r, &yi) in m.iter().zip(y) {
        for (o, a) in out.iter_mut().zip(r) {
            *o += a * yi;
        }
    }
    out
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

#[test]
fn c4_gradient_and_divergence() {
    let g = fam("cycle:4");
    let f = [0.0, 1.0, 2.0, 3.0];
    let t = gradient(&g, &f);
    assert_eq!(t[g.edge_id(0, 1).unwrap()], 1.0);
    assert_eq!(t[g.edge_id(2, 3).unwrap()], 1.0);
    assert_eq!(t[g.edge_id(0, 3).unwrap()], 3.0);
    // ∇*∇f(x) = Σ (f(x) - f(y))
    assert_eq!(divergence(&g, &t), vec![-4.0, 0.0, 0.0, 4.0]);
    assert_eq!(divergence_laplacian(&g, &f), vec![-4.0, 0.0, 0.0, 4.0]);
}

#[test]
fn k4_walk_example() {
    let g = fam("complete:4");
    let delta = [1.0, 0.0, 0.0, 0.0];
    let pushed = walk_push(&g, &delta);
    assert!(close(&pushed, &[0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 1e-15));
    let applied = walk_apply(&g, &delta);
    assert!(close(&applied, &[0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 1e-15));
    let lap = laplacian_apply(&g, &delta, Laplacian::Walk).unwrap();
    assert!(close(&lap, &[1.0, -1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0], 1e-15));
}

#[test]
fn divergence_laplacian_matches_dense_oracle() {
    for name in ["cycle:6", "complete:5", "hypercube:3", "petersen", "grid:3x4", "path:5"] {
        let g = fam(name);
        let n = g.vertex_count();
        let b = incidence(&g);
        let f: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let dense = mat_t_vec(&b, &mat_vec(&b, &f), n);
        assert!(close(&dense, &divergence_laplacian(&g, &f), 1e-12), "{name}");
        assert!(close(&dense, &divergence(&g, &gradient(&g, &f)), 1e-12), "{name}");
        if let Some(d) = g.regular_degree() {
            let walk = laplacian_apply(&g, &f, Laplacian::Walk).unwrap();
            let scaled: Vec<f64> = walk.iter().map(|x| d as f64 * x).collect();
            assert!(close(&dense, &scaled, 1e-12), "{name}");
        }
    }
}

#[test]
fn plus_gradient_is_symmetric_sum() {
    let g = fam("path:4");
    assert_eq!(plus_gradient(&g, &[1.0, 2.0, 4.0, 8.0]), vec![3.0, 6.0, 12.0]);
}

#[test]
fn norms_and_conjugates() {
    let v = [3.0, -4.0];
    assert_eq!(lp_norm(&v, 1.0).unwrap(), 7.0);
    assert_eq!(lp_norm(&v, 2.0).unwrap(), 5.0);
    assert_eq!(lp_norm(&v, f64::INFINITY).unwrap(), 4.0);
    assert!((lp_norm(&v, 3.0).unwrap() - 91f64.cbrt()).abs() < 1e-14);
    assert!(lp_norm(&v, 0.5).is_err());
    assert_eq!(conjugate(2.0), 2.0);
    assert_eq!(conjugate(3.0), 1.5);
    assert_eq!(conjugate(1.0), f64::INFINITY);
    assert_eq!(p_bar(1.5), 3.0);
    assert_eq!(compensated_sum([1e16, 1.0, -1e16]), 1.0);
    let mut f = vec![1.0, 2.0, 6.0];
    project_zero_sum(&mut f);
    assert_eq!(f, vec![-2.0, -1.0, 3.0]);
}

fn graph_and_functions() -> impl Strategy<Value = (FiniteGraph, Vec<f64>, Vec<f64>)> {
    prop_oneof![Just("cycle:7"), Just("complete:5"), Just("petersen"), Just("grid:3x3"), Just("hypercube:3"), Just("random-regular:n=10,d=3,seed=5")]
        .prop_map(fam)
        .prop_flat_map(|g| {
            let (n, m) = (g.vertex_count(), g.edge_count());
            (Just(g), proptest::collection::vec(-10.0f64..10.0, n), proptest::collection::vec(-10.0f64..10.0, m))
        })
}

proptest! {
    #[test]
    fn gradient_and_divergence_are_adjoint((g, f, t) in graph_and_functions()) {
        let lhs = pairing(&gradient(&g, &f), &t);
        let rhs = pairing(&f, &divergence(&g, &t));
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn divergence_is_conservative((g, _f, t) in graph_and_functions()) {
        let total = compensated_sum(divergence(&g, &t));
        prop_assert!(total.abs() < 1e-10);
    }

    #[test]
    fn walk_push_is_adjoint_of_walk_apply_on_regular((g, f, _t) in graph_and_functions(), seed in 0usize..1000) {
        let mu: Vec<f64> = (0..g.vertex_count()).map(|i| ((i * 31 + seed) % 17) as f64).collect();
        let lhs = pairing(&walk_push(&g, &mu), &f);
        let rhs = pairing(&mu, &walk_apply(&g, &f));
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
        let mass: f64 = mu.iter().sum();
        prop_assert!((walk_push(&g, &mu).iter().sum::<f64>() - mass).abs() <= 1e-10 * mass.max(1.0));
    }

    #[test]
    fn holder_inequality(a in proptest::collection::vec(-5.0f64..5.0, 1..30), p in 1.0f64..8.0) {
        let b: Vec<f64> = a.iter().rev().map(|x| x * 0.5 - 1.0).collect();
        let q = conjugate(p);
        let lhs = pairing(&a, &b).abs();
        let rhs = lp_norm(&a, p).unwrap() * lp_norm(&b, q).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn norm_is_monotone_in_p(a in proptest::collection::vec(-5.0f64..5.0, 1..30), p in 1.0f64..6.0) {
        let lo = lp_norm(&a, p + 1.0).unwrap();
        let hi = lp_norm(&a, p).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-12) + 1e-15);
        prop_assert!(lp_norm(&a, f64::INFINITY).unwrap() <= lo * (1.0 + 1e-12) + 1e-15);
    }
}
