//! Simple random walks: sparse distributions on lazy graphs, return
//! probabilities (with an exact transfer method for the lamplighter),
//! stretched-exponential fits, and the `c₀` / `ℓ¹` witness sequences.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::FiniteGraph;
use crate::lazy::{materialize_ball, LazyGraph};

#[derive(Clone, Debug)]
pub struct SparseDistribution<L> {
    pub probs: HashMap<L, f64>,
    pub steps: usize,
    /// Mass dropped to respect the support budget.
    pub loss: f64,
}

impl<L: Eq + Hash> SparseDistribution<L> {
    pub fn mass(&self) -> f64 {
        crate::operators::compensated_sum(self.probs.values().copied())
    }

    pub fn get(&self, x: &L) -> f64 {
        self.probs.get(x).copied().unwrap_or(0.0)
    }

    pub fn degraded(&self) -> bool {
        self.loss > 0.0
    }
}

fn push<G: LazyGraph>(g: &G, probs: &HashMap<G::Label, f64>) -> HashMap<G::Label, f64> {
    let mut next = HashMap::with_capacity(probs.len() * 2);
    for (x, &p) in probs {
        let nb = g.neighbors(x);
        let share = p / nb.len() as f64;
        for y in nb {
            *next.entry(y).or_insert(0.0) += share;
        }
    }
    next
}

/// Drops the smallest entries until at most `budget` remain; returns the
/// dropped mass.
fn trim<L: Eq + Hash + Clone>(probs: &mut HashMap<L, f64>, budget: usize) -> f64 {
    if probs.len() <= budget {
        return 0.0;
    }
    let mut values: Vec<f64> = probs.values().copied().collect();
    let cut = probs.len() - budget;
    values.select_nth_unstable_by(cut - 1, |a, b| a.total_cmp(b));
    let threshold = values[cut - 1];
    let mut dropped = 0.0;
    let mut left = cut;
    probs.retain(|_, p| {
        if left > 0 && *p <= threshold {
            left -= 1;
            dropped += *p;
            false
        } else {
            true
        }
    });
    dropped
}

/// `P^k δ_x` by sparse front expansion, keeping at most `budget` labels.
pub fn walk_distribution<G: LazyGraph>(g: &G, x: &G::Label, k: usize, budget: usize) -> Result<SparseDistribution<G::Label>> {
    if budget == 0 {
        return Err(Error::InvalidArgument("support budget must be positive".into()));
    }
    let mut probs = HashMap::from([(x.clone(), 1.0)]);
    let mut loss = 0.0;
    for _ in 0..k {
        probs = push(g, &probs);
        loss += trim(&mut probs, budget);
    }
    Ok(SparseDistribution { probs, steps: k, loss })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReturnSeries {
    /// `ρ_k` for `k = 0..=k_max`; lower bounds where `loss > 0`.
    pub rho: Vec<f64>,
    /// Cumulative dropped mass (walk) or truncation gap (transfer method).
    pub loss: Vec<f64>,
    /// All odd entries vanish exactly.
    pub bipartite: bool,
}

impl ReturnSeries {
    /// `k,rho,loss` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,rho,loss\n");
        for (k, (r, l)) in self.rho.iter().zip(&self.loss).enumerate() {
            s.push_str(&format!("{k},{r:e},{l:e}\n"));
        }
        s
    }
}

pub fn return_probability<G: LazyGraph>(g: &G, x: &G::Label, k_max: usize, budget: usize) -> Result<ReturnSeries> {
    let mut probs = HashMap::from([(x.clone(), 1.0)]);
    let mut rho = vec![1.0];
    let mut loss = vec![0.0];
    let mut dropped = 0.0;
    for _ in 0..k_max {
        probs = push(g, &probs);
        dropped += trim(&mut probs, budget);
        rho.push(probs.get(x).copied().unwrap_or(0.0));
        loss.push(dropped);
    }
    let bipartite = k_max >= 1 && rho.iter().skip(1).step_by(2).all(|&r| r == 0.0);
    Ok(ReturnSeries { rho, loss, bipartite })
}

fn even_part(y: &mut [f64]) {
    for c in y.iter_mut().skip(1).step_by(2) {
        *c = 0.0;
    }
}

/// One region update: from `R̃_b` (b ≤ N) build `T'(a, 0) = u^a Σ_b C(a+b-1, b) u^b R̃_b`
/// for `a ≤ rows`, with `u = 1/(1 - v x)`. Row `a` is kept to degree
/// `len - 1 + 2 slack - 2a`, which is all its consumers read.
fn transfer_rows(rt: &[Vec<f64>], rows: usize, v: f64, slack: usize) -> Vec<Vec<f64>> {
    let n = rt.len() - 1;
    let len = rt[0].len();
    let limit = |a: usize| (len + 2 * slack).saturating_sub(2 * a).min(len);
    let mut prev: Vec<Vec<f64>> = rt.to_vec();
    let mut row = vec![vec![0.0; len]; n + 1];
    let mut out = vec![rt[0].clone()];
    for a in 1..=rows {
        let top = limit(a);
        for m in (0..=n).rev() {
            // T'(a, m) = U(T'(a-1, m) + T'(a, m+1)); both vanish below degree 2m
            let start = 2 * m;
            if start >= top {
                row[m][..top].fill(0.0);
                continue;
            }
            let (head, tail) = row.split_at_mut(m + 1);
            let cur = &mut head[m];
            let p = &prev[m];
            cur[..start].fill(0.0);
            let mut last = 0.0;
            match tail.first() {
                Some(next) => {
                    for j in start..top {
                        last = p[j] + next[j] + v * last;
                        cur[j] = last;
                    }
                }
                None => {
                    for j in start..top {
                        last = p[j] + v * last;
                        cur[j] = last;
                    }
                }
            }
        }
        let mut t0 = row[0].clone();
        t0[top..].fill(0.0);
        out.push(t0);
        std::mem::swap(&mut prev, &mut row);
    }
    out
}

fn shifted(r: &[Vec<f64>], v: f64) -> Vec<Vec<f64>> {
    r.iter()
        .enumerate()
        .map(|(b, poly)| {
            let len = poly.len();
            let mut s = vec![0.0; len];
            let w = v.powi(2 * b as i32);
            for j in 0..len.saturating_sub(2 * b) {
                s[j + 2 * b] = poly[j] * w;
            }
            s
        })
        .collect()
}

/// Return probabilities of the lamplighter walk (toggle, step right, step
/// left, each with probability 1/3) from the identity, by transfer over
/// sites: each edge `(s, s+1)` carries its crossing count, each site the
/// parity constraint on its toggles. Paths crossing some edge more than
/// `max_crossings` times or leaving `[-depth, depth]` are omitted, so the
/// values are lower bounds, exact when both limits are at least `k_max/2`.
pub fn lamplighter_return_truncated(k_max: usize, max_crossings: usize, depth: usize) -> Vec<f64> {
    let v = 1.0 / 3.0;
    let len = k_max + 1;
    let n = max_crossings.min(k_max / 2).max(1);
    let depth = depth.min(k_max / 2);
    let mut one = vec![0.0; len];
    one[0] = 1.0;
    let mut r: Vec<Vec<f64>> = (0..=n).map(|b| if b == 0 { one.clone() } else { vec![0.0; len] }).collect();
    for _ in 0..depth {
        let rt = shifted(&r, v);
        let rows = transfer_rows(&rt, n, v, 0);
        r = rows
            .into_iter()
            .enumerate()
            .map(|(a, mut p)| {
                if a == 0 {
                    one.clone()
                } else {
                    even_part(&mut p);
                    p
                }
            })
            .collect();
    }
    // origin: Σ_{a,b} C(a+b, a) W_{a+b+1} R̃_a R̃_b = even part of Σ_a R̃_a T'(a+1, 0)
    let rt = shifted(&r, v);
    let rows = transfer_rows(&rt, n + 1, v, 1);
    let mut g = vec![0.0; len];
    for a in 0..=n {
        let lhs = &rt[a];
        let rhs = &rows[a + 1];
        for (i, &x) in lhs.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for j in 0..len - i {
                g[i + j] += x * rhs[j];
            }
        }
    }
    even_part(&mut g);
    g
}

/// Lamplighter return series with truncation limits grown until enlarging
/// both by a quarter changes no entry by more than `rel_tol` relative;
/// `loss[k]` is that last relative change.
pub fn lamplighter_return(k_max: usize, rel_tol: f64) -> ReturnSeries {
    let exact_limit = (k_max / 2).max(1);
    let mut crossings = (k_max / 14).max(24).min(exact_limit);
    let mut depth = (k_max / 30).max(16).min(exact_limit);
    let mut base = lamplighter_return_truncated(k_max, crossings, depth);
    loop {
        if crossings >= exact_limit && depth >= exact_limit {
            return ReturnSeries { loss: vec![0.0; base.len()], rho: base, bipartite: true };
        }
        crossings = (crossings + crossings / 4).min(exact_limit);
        depth = (depth + depth / 4).min(exact_limit);
        let next = lamplighter_return_truncated(k_max, crossings, depth);
        let loss: Vec<f64> = next.iter().zip(&base).map(|(a, b)| if *a > 0.0 { (a - b) / a } else { 0.0 }).collect();
        base = next;
        if loss.iter().all(|&l| l <= rel_tol) {
            return ReturnSeries { rho: base, loss, bipartite: true };
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    pub k_range: (usize, usize),
    pub ks: Vec<usize>,
    pub rho: Vec<f64>,
    pub gamma: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    pub residual: f64,
}

fn gamma_fit_at(logk: &[f64], logrho: &[f64], log_k1: f64) -> (f64, f64, f64) {
    let y: Vec<f64> = logrho.iter().map(|&l| (log_k1 - l).ln()).collect();
    let n = y.len() as f64;
    let mx = logk.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = logk.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = logk.iter().zip(&y).map(|(x, v)| (x - mx) * (v - my)).sum();
    let gamma = sxy / sxx;
    let c = my - gamma * mx;
    let rss = logk.iter().zip(&y).map(|(x, v)| (v - c - gamma * x).powi(2)).sum();
    (gamma, c, rss)
}

/// Fits `ρ_k ≈ K₁ exp(-K₂ k^γ)` on `k ∈ [k_min, k_max]` by least squares of
/// `log(log K₁ - log ρ_k)` against `log k`, with `K₁` profiled. Uses even `k`
/// only when `bipartite`.
pub fn fit_gamma(rho: &[f64], k_min: usize, k_max: usize, bipartite: bool) -> Result<DecayFit> {
    let k_max = k_max.min(rho.len().saturating_sub(1));
    let ks: Vec<usize> = (k_min.max(1)..=k_max).filter(|k| !bipartite || k % 2 == 0).collect();
    if ks.len() < 3 {
        return Err(Error::InvalidArgument("need at least three points to fit".into()));
    }
    if let Some(&k) = ks.iter().find(|&&k| !(rho[k] > 0.0)) {
        return Err(Error::InvalidArgument(format!("ρ_{k} = {} is not positive", rho[k])));
    }
    let logk: Vec<f64> = ks.iter().map(|&k| (k as f64).ln()).collect();
    let logrho: Vec<f64> = ks.iter().map(|&k| rho[k].ln()).collect();
    let top = logrho.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    // log K₁ = top + e^s, scanned then refined by golden section
    let rss_at = |s: f64| gamma_fit_at(&logk, &logrho, top + s.exp()).2;
    let (lo, hi) = (-25.0f64, 5.0f64);
    let steps = 600;
    let mut best = (f64::INFINITY, lo);
    for i in 0..=steps {
        let s = lo + (hi - lo) * i as f64 / steps as f64;
        let r = rss_at(s);
        if r < best.0 {
            best = (r, s);
        }
    }
    let h = (hi - lo) / steps as f64;
    let (mut a, mut b) = (best.1 - h, best.1 + h);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if rss_at(c) <= rss_at(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let s = 0.5 * (a + b);
    let log_k1 = top + s.exp();
    let (gamma, c, residual) = gamma_fit_at(&logk, &logrho, log_k1);
    Ok(DecayFit {
        k_range: (k_min, k_max),
        rho: ks.iter().map(|&k| rho[k]).collect(),
        ks,
        gamma,
        k1: log_k1.exp(),
        k2: c.exp(),
        residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessC0 {
    pub n: usize,
    /// `f_n` at the root.
    pub root_value: f64,
    pub sup_value: f64,
    /// `‖∇f_n‖_∞`, exact as `numerator / (n+1)`.
    pub sup_gradient_numerator: u32,
    pub sup_gradient: f64,
    pub pass: bool,
}

/// `f_n = (1/(n+1)) Σ_{i ≤ n} 1_{B_i(root)}`, i.e. `(n+1-d)^+/(n+1)`.
pub fn witness_c0<G: LazyGraph>(g: &G, root: &G::Label, n: usize, budget: usize) -> Result<WitnessC0> {
    let w = materialize_ball(g, root, n + 1, budget)?;
    let dist = crate::graph::bfs_distances(&w.graph, &[w.index_of(root).expect("center present")], None);
    let scaled: Vec<u32> = dist.iter().map(|&d| (n as u32 + 1).saturating_sub(d)).collect();
    let grad = w.graph.edges().iter().map(|&(a, b)| scaled[a].abs_diff(scaled[b])).max().unwrap_or(0);
    let top = *scaled.iter().max().unwrap();
    let root_value = scaled[w.index_of(root).unwrap()] as f64 / (n + 1) as f64;
    Ok(WitnessC0 {
        n,
        root_value,
        sup_value: top as f64 / (n + 1) as f64,
        sup_gradient_numerator: grad,
        sup_gradient: grad as f64 / (n + 1) as f64,
        pass: grad <= 1 && top == n as u32 + 1,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessL1 {
    pub n: usize,
    /// `‖f_n‖₁`.
    pub mass: f64,
    /// `‖(I - P) f_n‖₁ = ‖δ_x - P^{n+1} δ_x‖₁ / (n+1)`.
    pub laplacian_l1: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `f_n = (1/(n+1)) Σ_{i ≤ n} P^i δ_x` on a finite graph, evaluated directly.
pub fn witness_l1(g: &FiniteGraph, x: usize, n: usize) -> Result<WitnessL1> {
    if x >= g.vertex_count() {
        return Err(Error::InvalidArgument(format!("vertex {x} out of range")));
    }
    let mut mu = vec![0.0; g.vertex_count()];
    mu[x] = 1.0;
    let mut f = vec![0.0; g.vertex_count()];
    for i in 0..=n {
        if i > 0 {
            mu = crate::operators::walk_push(g, &mu);
        }
        for (a, b) in f.iter_mut().zip(&mu) {
            *a += b / (n + 1) as f64;
        }
    }
    let pf = crate::operators::walk_push(g, &f);
    let lap: Vec<f64> = f.iter().zip(&pf).map(|(a, b)| a - b).collect();
    let laplacian_l1 = crate::operators::lp_norm(&lap, 1.0)?;
    let bound = 2.0 / (n + 1) as f64;
    Ok(WitnessL1 { n, mass: crate::operators::compensated_sum(f.iter().copied()), laplacian_l1, bound, pass: laplacian_l1 <= bound * (1.0 + 1e-12) })
}

/// Same quantity from a return probability: `‖δ_x - μ‖₁ = 2(1 - μ(x))` for a
/// probability vector `μ`, so `‖(I-P) f_n‖₁ = 2(1 - ρ_{n+1})/(n+1)`.
pub fn witness_l1_from_return(n: usize, rho_next: f64) -> WitnessL1 {
    let laplacian_l1 = 2.0 * (1.0 - rho_next) / (n + 1) as f64;
    let bound = 2.0 / (n + 1) as f64;
    WitnessL1 { n, mass: 1.0, laplacian_l1, bound, pass: rho_next >= 0.0 && laplacian_l1 <= bound }
}

/// Materializes the walk support `B_{n+1}(x)` of a lazy graph and evaluates
/// [`witness_l1`] there.
pub fn witness_l1_lazy<G: LazyGraph>(g: &G, x: &G::Label, n: usize, budget: usize) -> Result<WitnessL1> {
    let w = materialize_ball(g, x, n + 2, budget)?;
    let root = w.index_of(x).expect("center present");
    witness_l1(&w.graph, root, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lazy::{LampLabel, Lamplighter, LazyCycle};

    #[test]
    fn walk_examples() {
        let d0 = walk_distribution(&Lamplighter, &LampLabel::identity(), 0, 10).unwrap();
        assert_eq!(d0.get(&LampLabel::identity()), 1.0);
        let d1 = walk_distribution(&Lamplighter, &LampLabel::identity(), 1, 10).unwrap();
        assert_eq!(d1.probs.len(), 3);
        assert!(d1.probs.values().all(|&p| (p - 1.0 / 3.0).abs() < 1e-15));
        let c4 = walk_distribution(&LazyCycle(4), &0, 2, 10).unwrap();
        assert_eq!(c4.get(&0), 0.5);
        assert_eq!(c4.get(&2), 0.5);
        let tight = walk_distribution(&Lamplighter, &LampLabel::identity(), 6, 20).unwrap();
        assert!(tight.degraded());
        assert!((tight.mass() + tight.loss - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cycle_returns() {
        let s = return_probability(&LazyCycle(4), &0, 6, 100).unwrap();
        assert!(s.bipartite);
        assert_eq!(s.rho[2], 0.5);
        assert_eq!(s.rho[0], 1.0);
    }

    #[test]
    fn lamplighter_transfer_matches_enumeration() {
        let direct = return_probability(&Lamplighter, &LampLabel::identity(), 12, 1 << 22).unwrap();
        let exact = lamplighter_return_truncated(12, 6, 6);
        for k in 0..=12 {
            assert!((direct.rho[k] - exact[k]).abs() < 1e-15, "k = {k}");
        }
        let known = [(2, 1.0 / 3.0), (4, 5.0 / 27.0), (6, 29.0 / 243.0), (8, 547.0 / 6561.0), (10, 3623.0 / 59049.0)];
        for (k, r) in known {
            assert!((exact[k] - r).abs() < 1e-15);
        }
    }

    #[test]
    fn synthetic_fits() {
        let a: Vec<f64> = (0..=400).map(|k| (-(k as f64).sqrt()).exp()).collect();
        let f = fit_gamma(&a, 10, 400, false).unwrap();
        assert!((f.gamma - 0.5).abs() < 0.01, "{}", f.gamma);
        let b: Vec<f64> = (0..=400).map(|k| 0.9 * (-2.0 * (k as f64).cbrt()).exp()).collect();
        let f = fit_gamma(&b, 10, 400, false).unwrap();
        assert!((f.gamma - 1.0 / 3.0).abs() < 0.02, "{}", f.gamma);
        let c: Vec<f64> = b.iter().map(|x| 7.0 * x).collect();
        assert!((fit_gamma(&c, 10, 400, false).unwrap().gamma - f.gamma).abs() < 1e-6);
        assert!(fit_gamma(&[1.0, 0.0, 0.5], 0, 2, false).is_err());
    }

    #[test]
    fn witnesses() {
        let w0 = witness_c0(&Lamplighter, &LampLabel::identity(), 0, 1000).unwrap();
        assert!(w0.pass && w0.root_value == 1.0);
        let w5 = witness_c0(&Lamplighter, &LampLabel::identity(), 5, 100_000).unwrap();
        assert!(w5.pass && w5.sup_gradient <= 1.0 / 6.0);
        let l0 = witness_l1_lazy(&Lamplighter, &LampLabel::identity(), 0, 1000).unwrap();
        assert_eq!(l0.laplacian_l1, 2.0);
        let l6 = witness_l1_lazy(&Lamplighter, &LampLabel::identity(), 6, 1 << 20).unwrap();
        let rho = lamplighter_return_truncated(7, 4, 4);
        assert!((l6.mass - 1.0).abs() < 1e-12);
        assert!((l6.laplacian_l1 - witness_l1_from_return(6, rho[7]).laplacian_l1).abs() < 1e-12);
    }
}
