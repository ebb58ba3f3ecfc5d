use std::collections::HashMap;

use isotransport::graph::generate_family;
use isotransport::lazy::{LampLabel, Lamplighter, Lattice, LazyCycle, DEFAULT_VERTEX_BUDGET};
use isotransport::walks::{
    fit_gamma, lamplighter_return, lamplighter_return_truncated, return_probability, walk_distribution, witness_c0, witness_l1, witness_l1_from_return, witness_l1_lazy,
};
use proptest::prelude::*;

/// Lamplighter return probabilities by dynamic programming over
/// `(lamp bitmask, position)` with lamps stored at offset `k`.
fn lamplighter_oracle(k_max: usize) -> Vec<f64> {
    let off = k_max as i64;
    let mut cur: HashMap<(u64, i64), f64> = HashMap::from([((0, 0), 1.0)]);
    let mut out = vec![1.0];
    for _ in 0..k_max {
        let mut next = HashMap::new();
        for (&(lamps, pos), &p) in &cur {
            for state in [(lamps ^ (1 << (pos + off)), pos), (lamps, pos + 1), (lamps, pos - 1)] {
                *next.entry(state).or_insert(0.0) += p / 3.0;
            }
        }
        out.push(next.get(&(0, 0)).copied().unwrap_or(0.0));
        cur = next;
    }
    out
}

fn binomial_return(k: usize) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let mut r = 1.0;
    for i in 0..k / 2 {
        r *= (k - i) as f64 / ((k / 2 - i) as f64 * 4.0);
    }
    r
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[test]
fn lamplighter_small_returns_are_exact() {
    let s = lamplighter_return(12, 1e-12);
    let exact = [(2, 1.0 / 3.0), (4, 5.0 / 27.0), (6, 29.0 / 243.0), (8, 547.0 / 6561.0), (10, 3623.0 / 59049.0)];
    for (k, want) in exact {
        assert!(rel(s.rho[k], want) < 1e-13, "k={k}");
    }
    assert!(s.bipartite);
    assert!(s.rho.iter().skip(1).step_by(2).all(|&r| r == 0.0));
}

#[test]
fn transfer_method_matches_enumeration() {
    let k_max = 18;
    let oracle = lamplighter_oracle(k_max);
    let transfer = lamplighter_return_truncated(k_max, k_max, k_max);
    let walk = return_probability(&Lamplighter, &LampLabel::identity(), k_max, DEFAULT_VERTEX_BUDGET).unwrap();
    for k in 0..=k_max {
        assert!(rel(oracle[k], transfer[k]) < 1e-12, "k={k}");
        assert!(rel(oracle[k], walk.rho[k]) < 1e-12, "k={k}");
    }
    assert!(walk.loss.iter().all(|&l| l == 0.0));
}

#[test]
fn truncation_gives_lower_bounds() {
    let full = lamplighter_return_truncated(60, 30, 30);
    for (c, d) in [(3, 30), (30, 3), (5, 5)] {
        let part = lamplighter_return_truncated(60, c, d);
        for k in 0..=60 {
            assert!(part[k] <= full[k] * (1.0 + 1e-12), "limits ({c},{d}) k={k}");
        }
    }
}

#[test]
fn lamplighter_series_converges_to_tolerance() {
    let s = lamplighter_return(400, 1e-8);
    assert!(s.loss.iter().all(|&l| l <= 1e-8));
    let exact = lamplighter_return_truncated(400, 200, 200);
    for k in (100..=400).step_by(50) {
        assert!(rel(s.rho[k], exact[k]) < 1e-7, "k={k}");
    }
    assert!(s.to_csv().starts_with("k,rho,loss\n0,1e0,0e0\n"));
}

#[test]
fn cycle_and_lattice_returns() {
    let n = 7;
    let s = return_probability(&LazyCycle(n), &0, 30, 1000).unwrap();
    for k in 0..=30 {
        let want: f64 = (0..n).map(|j| (std::f64::consts::TAU * j as f64 / n as f64).cos().powi(k as i32)).sum::<f64>() / n as f64;
        assert!((s.rho[k] - want).abs() < 1e-13, "k={k}");
    }
    assert!(!s.bipartite);
    let z = return_probability(&Lattice(1), &vec![0], 60, 1000).unwrap();
    for k in 0..=60 {
        assert!(rel(z.rho[k], binomial_return(k)) < 1e-12, "k={k}");
    }
    assert!(z.bipartite);
}

#[test]
fn walk_distribution_budget() {
    let full = walk_distribution(&Lamplighter, &LampLabel::identity(), 8, 1 << 20).unwrap();
    assert!(!full.degraded());
    assert!((full.mass() - 1.0).abs() < 1e-13);
    let tight = walk_distribution(&Lamplighter, &LampLabel::identity(), 8, 40).unwrap();
    assert!(tight.probs.len() <= 40);
    assert!((tight.mass() + tight.loss - 1.0).abs() < 1e-13);
    for (x, &p) in &tight.probs {
        assert!(p <= full.get(x) + 1e-15);
    }
}

fn synthetic(k1: f64, k2: f64, gamma: f64, k_max: usize) -> Vec<f64> {
    (0..=k_max).map(|k| if k % 2 == 0 { k1 * (-k2 * (k as f64).powf(gamma)).exp() } else { 0.0 }).collect()
}

#[test]
fn synthetic_fits_recover_gamma() {
    for (k1, k2, gamma) in [(1.0, 1.0, 1.0 / 3.0), (5.0, 2.0, 0.2), (0.3, 0.5, 0.5), (2.0, 0.1, 0.8)] {
        let rho = synthetic(k1, k2, gamma, 2000);
        let fit = fit_gamma(&rho, 100, 2000, true).unwrap();
        assert!((fit.gamma - gamma).abs() < 0.02, "γ={gamma}: {}", fit.gamma);
        assert!(fit.ks.iter().all(|k| k % 2 == 0));
        assert_eq!(fit.k_range, (100, 2000));
    }
    assert!(fit_gamma(&[1.0, 0.5], 0, 1, false).is_err());
    assert!(fit_gamma(&synthetic(1.0, 1.0, 0.5, 20), 1, 20, false).is_err());
}

#[test]
fn lamplighter_gamma_lies_in_the_stretched_band() {
    let s = lamplighter_return(800, 1e-7);
    let fit = fit_gamma(&s.rho, 100, 800, s.bipartite).unwrap();
    assert!(fit.gamma > 0.2 && fit.gamma < 0.5, "{}", fit.gamma);
}

#[test]
fn c0_witness() {
    for n in 0..=6 {
        let w = witness_c0(&Lamplighter, &LampLabel::identity(), n, DEFAULT_VERTEX_BUDGET).unwrap();
        assert!(w.pass);
        assert_eq!(w.sup_gradient_numerator, 1);
        assert_eq!(w.root_value, 1.0);
        assert!((w.sup_gradient - 1.0 / (n + 1) as f64).abs() < 1e-15);
    }
    let z = witness_c0(&Lattice(2), &vec![0, 0], 5, DEFAULT_VERTEX_BUDGET).unwrap();
    assert!(z.pass && z.sup_gradient_numerator == 1);
}

#[test]
fn l1_witness_three_ways() {
    let rho = lamplighter_oracle(14);
    for n in 0..=12 {
        let lazy = witness_l1_lazy(&Lamplighter, &LampLabel::identity(), n, DEFAULT_VERTEX_BUDGET).unwrap();
        let ident = witness_l1_from_return(n, rho[n + 1]);
        assert!(lazy.pass && ident.pass);
        assert!((lazy.laplacian_l1 - ident.laplacian_l1).abs() < 1e-12, "n={n}");
        assert!((lazy.mass - 1.0).abs() < 1e-12);
    }
    let g = generate_family(&"petersen".parse().unwrap()).unwrap();
    for n in 0..10 {
        let w = witness_l1(&g, 0, n).unwrap();
        assert!(w.pass && (w.bound - 2.0 / (n + 1) as f64).abs() < 1e-15);
    }
    assert!(witness_l1(&g, 10, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fit_recovers_random_stretched_exponentials(gamma in 0.2f64..0.8, k2 in 0.2f64..3.0, k1 in 0.1f64..10.0) {
        // stay clear of underflow
        prop_assume!(k2 * 2000f64.powf(gamma) < 600.0);
        let rho = synthetic(k1, k2, gamma, 2000);
        let fit = fit_gamma(&rho, 100, 2000, true).unwrap();
        prop_assert!((fit.gamma - gamma).abs() < 0.02);
    }

    #[test]
    fn fit_is_scale_equivariant(gamma in 0.2f64..0.8, c in 0.01f64..100.0) {
        let rho = synthetic(1.0, 1.0, gamma, 1000);
        let scaled: Vec<f64> = rho.iter().map(|r| r * c).collect();
        let a = fit_gamma(&rho, 50, 1000, true).unwrap();
        let b = fit_gamma(&scaled, 50, 1000, true).unwrap();
        prop_assert!((a.gamma - b.gamma).abs() < 1e-6);
        prop_assert!(rel(a.k1 * c, b.k1) < 1e-6);
        prop_assert!(rel(a.k2, b.k2) < 1e-4);
    }
}
