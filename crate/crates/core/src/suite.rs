//! The verification battery: one entry per checked property, each with its
//! failing sub-checks listed by name.

use std::time::Instant;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::counterexample::{counterexample_build, counterexample_report};
use crate::error::Result;
use crate::graph::{boundary_size, generate_family, tree_ray_graph, Family, FiniteGraph, VertexSubset};
use crate::isoperimetry::profile_exact;
use crate::lazy::{lamplighter_window, LampLabel, Lamplighter, DEFAULT_VERTEX_BUDGET};
use crate::operators::divergence;
use crate::spectral::{cheeger_exact, k2_kappa_p, lambda2_exact, verify_chain, ChainSettings};
use crate::subsets::for_each_connected_subset;
use crate::transport::{folner_radius, harmonic_difference_pipeline, pairing_bound, potential_pattern, split_measure, PipelineMode, TransportPattern};
use crate::walks::{fit_gamma, lamplighter_return, witness_c0, witness_l1_from_return, witness_l1_lazy};

pub const CHAIN_EXPONENTS: [f64; 4] = [1.5, 2.0, 3.0, 5.0];
pub const FOLNER_EPS: [f64; 4] = [0.1, 0.25, 0.5, 0.75];

/// The regular test graphs, all with at most 10 vertices.
pub fn suite_families() -> Vec<Family> {
    vec![
        Family::Cycle(4),
        Family::Cycle(6),
        Family::Cycle(8),
        Family::Complete(4),
        Family::Complete(5),
        Family::Hypercube(3),
        Family::Petersen,
        Family::RandomRegular { n: 6, d: 3, seed: 1 },
        Family::RandomRegular { n: 8, d: 3, seed: 2 },
        Family::RandomRegular { n: 10, d: 3, seed: 3 },
        Family::RandomRegular { n: 8, d: 5, seed: 4 },
        Family::RandomRegular { n: 10, d: 4, seed: 5 },
    ]
}

pub fn suite_graphs() -> Result<Vec<(String, FiniteGraph)>> {
    suite_families().into_iter().map(|f| Ok((f.to_string(), generate_family(&f)?))).collect()
}

/// Up to `count` connected proper subsets, sampled with `seed` when there
/// are more, returned in enumeration order.
pub fn connected_family(g: &FiniteGraph, count: usize, seed: u64) -> Vec<VertexSubset> {
    let n = g.vertex_count();
    let mut all = Vec::new();
    for_each_connected_subset(g, n.saturating_sub(1), |s| all.push(s.to_vec()));
    if all.len() > count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx: Vec<usize> = (0..all.len()).collect();
        idx.shuffle(&mut rng);
        idx.truncate(count);
        idx.sort_unstable();
        all = idx.into_iter().map(|i| std::mem::take(&mut all[i])).collect();
    }
    all.into_iter().map(|s| VertexSubset::from_members(n, s).expect("members in range")).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub pass: bool,
    pub summary: String,
    pub failures: Vec<String>,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!("[{tag}] {:>2} {}: {} ({:.1} s)", self.id, self.name, self.summary, self.seconds);
        for f in &self.failures {
            s.push_str(&format!("\n         failed: {f}"));
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub quick: bool,
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn passes(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }
}

struct Tally {
    failures: Vec<String>,
    checked: usize,
}

impl Tally {
    fn new() -> Self {
        Tally { failures: Vec::new(), checked: 0 }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self, id: u8, name: &str, summary: String, start: Instant) -> CriterionResult {
        CriterionResult {
            id,
            name: name.to_string(),
            pass: self.failures.is_empty(),
            summary,
            failures: self.failures,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

pub fn chain_criterion() -> Result<CriterionResult> {
    let start = Instant::now();
    let mut t = Tally::new();
    let settings = ChainSettings::default();
    let mut worst = f64::INFINITY;
    for (name, g) in suite_graphs()? {
        for p in CHAIN_EXPONENTS {
            let r = verify_chain(&g, &name, p, &settings)?;
            for item in r.chain.iter().filter(|c| !c.informational) {
                worst = worst.min(item.slack);
                t.check(item.pass, || format!("{name} p={p}: item {} slack {:e}", item.item, item.slack));
            }
        }
    }
    let k2 = generate_family(&Family::Complete(2))?;
    for p in CHAIN_EXPONENTS {
        let r = verify_chain(&k2, "complete:2", p, &settings)?;
        let table = r.chain.iter().find(|c| c.item.starts_with("4 (table")).expect("table item present");
        let lemma = r.chain.iter().find(|c| c.item.starts_with("4:")).expect("lemma item present");
        let expected = k2_kappa_p(p);
        t.check(!table.pass && (table.lhs - expected).abs() < 1e-12 && (table.rhs - 2.0).abs() < 1e-12, || {
            format!("complete:2 p={p}: table form expected to fail as κ_p = {expected} < λ_p = 2, got {} vs {}", table.lhs, table.rhs)
        });
        t.check(lemma.pass, || format!("complete:2 p={p}: lemma form fails"));
    }
    let summary = format!("{} chain items over 12 graphs × 4 exponents, worst slack {worst:.3e}; K₂ table form fails as expected", t.checked);
    Ok(t.finish(1, "spectral chain", summary, start))
}

pub fn cheeger_criterion() -> Result<CriterionResult> {
    let start = Instant::now();
    let mut t = Tally::new();
    for (name, g) in suite_graphs()? {
        let d = g.regular_degree().expect("suite graphs are regular") as f64;
        let k = cheeger_exact(&g)?.value;
        let kf = *k.numer() as f64 / *k.denom() as f64;
        let l2 = lambda2_exact(&g, None)?;
        t.check(kf * kf / (2.0 * d * d) <= l2 + 1e-9, || format!("{name}: κ₁²/(2d²) = {} > λ₂ = {l2}", kf * kf / (2.0 * d * d)));
        t.check(l2 <= 2.0 * kf / d + 1e-9, || format!("{name}: λ₂ = {l2} > 2κ₁/d = {}", 2.0 * kf / d));
    }
    let summary = format!("{} inequalities, exact κ₁", t.checked);
    Ok(t.finish(2, "Cheeger inequality", summary, start))
}

pub fn lamplighter_count_criterion(max_n: usize) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut t = Tally::new();
    for n in 1..=max_n {
        let w = lamplighter_window(n, DEFAULT_VERTEX_BUDGET)?;
        let size = w.core.len();
        let b = boundary_size(&w.graph, &w.core);
        t.check(size == n << n, || format!("n={n}: |F| = {size}, expected {}", n << n));
        t.check(b == 2 << n, || format!("n={n}: |∂F| = {b}, expected {}", 2 << n));
    }
    Ok(t.finish(3, "lamplighter counts", format!("|F_n| = n·2^n and |∂F_n| = 2^(n+1) for n ≤ {max_n}"), start))
}

pub fn counterexample_criterion(ns: &[usize], j: usize) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut ratios = Vec::new();
    let mut parts = Vec::new();
    for &n in ns {
        let c = counterexample_build(n, j, DEFAULT_VERTEX_BUDGET)?;
        let r = counterexample_report(&c, 1.0, 1.0)?;
        let translates = (n / j) << (n - j);
        t.check(r.log.translates == translates, || format!("n={n}: {} translates, expected {translates}", r.log.translates));
        for v in &r.verdicts {
            t.check(v.pass, || format!("n={n}: {} ({} vs {})", v.check, v.value, v.bound));
        }
        ratios.push((n, r.radial.ratio));
        parts.push(format!("n={n}: |F|={} |∂F|={} inrad={} ratio={:.4}", r.size, r.boundary, r.inradius, r.radial.ratio));
    }
    for w in ratios.windows(2) {
        t.check(w[1].1 < w[0].1, || format!("radial ratio not strictly decreasing: {:.4} (n={}) → {:.4} (n={})", w[0].1, w[0].0, w[1].1, w[1].0));
    }
    Ok(t.finish(4, "radial counterexample", parts.join("; "), start))
}

pub fn folner_criterion(seed: u64) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut attained = 0;
    let mut unattained = 0;
    for (i, (name, g)) in suite_graphs()?.into_iter().enumerate() {
        let d = g.regular_degree().expect("suite graphs are regular");
        for f in connected_family(&g, 50, seed.wrapping_add(i as u64)) {
            for eps in FOLNER_EPS {
                match folner_radius(&g, &f, d, eps, 200)? {
                    Some(r) => {
                        attained += 1;
                        t.check(r.pass, || format!("{name} F={:?} ε={eps}: r={} < {}", f.members(), r.r, r.bound));
                    }
                    None => unattained += 1,
                }
            }
        }
    }
    let summary = format!("{attained} radii checked exactly, {unattained} (F, ε) pairs never reach 1-ε on the finite graph");
    Ok(t.finish(5, "Følner radius lemma", summary, start))
}

pub fn transport_criterion(seed: u64, instances: usize) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut t = Tally::new();
    let graphs = suite_graphs()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..instances {
        let (name, g) = &graphs[i % graphs.len()];
        let p = CHAIN_EXPONENTS[i % CHAIN_EXPONENTS.len()];
        let f: Vec<f64> = (0..g.vertex_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let tau: Vec<f64> = (0..g.edge_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (target, source) = split_measure(&divergence(g, &tau))?;
        let outcome = TransportPattern::new(g, tau, source, target).and_then(|pat| pairing_bound(g, &f, &pat, p));
        t.check(outcome.is_ok(), || format!("{name} instance {i}: {}", outcome.unwrap_err()));
    }
    let mut worst_div = 0.0f64;
    let mut worst_res = 0.0f64;
    let mut solves = 0;
    for (name, g) in &graphs {
        for f in connected_family(g, 10, seed ^ 0x5eed).into_iter().filter(|f| f.len() >= 2) {
            let mut gv = vec![0.0; g.vertex_count()];
            for v in f.iter() {
                gv[v] = rng.gen_range(-1.0..1.0);
            }
            let mean = f.iter().map(|v| gv[v]).sum::<f64>() / f.len() as f64;
            for v in f.iter() {
                gv[v] -= mean;
            }
            let s = potential_pattern(g, &f, &gv, 1e-13)?;
            let div = s.pattern.residual(g);
            worst_div = worst_div.max(div);
            worst_res = worst_res.max(s.residual);
            solves += 1;
            t.check(div < 1e-10 && s.residual < 1e-10, || format!("{name} F={:?}: divergence residual {div:e}, solve residual {:e}", f.members(), s.residual));
        }
    }
    let summary = format!("{instances} pairing/Hölder instances; {solves} potential solves, worst divergence residual {worst_div:.1e}, worst solve residual {worst_res:.1e}");
    Ok(t.finish(6, "transport identities", summary, start))
}

pub fn decay_criterion(ns: &[usize], seed: u64) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut norms: Vec<(usize, f64)> = Vec::new();
    let mut parts = Vec::new();
    for &n in ns {
        let w = lamplighter_window(n, DEFAULT_VERTEX_BUDGET)?;
        let v = w.index_of(&LampLabel { lamps: vec![], pos: n as i64 / 2 }).expect("in window");
        let u = w.index_of(&LampLabel { lamps: vec![], pos: n as i64 / 2 + 1 }).expect("in window");
        let rep = harmonic_difference_pipeline(&w.graph, &w.core, 3, v, u, 2.0, PipelineMode::Radial, seed)?;
        for (check, ok) in &rep.checks {
            t.check(*ok, || format!("n={n}: {check}"));
        }
        t.check(rep.tau_norm <= rep.tau_in_bound, || format!("n={n}: ‖τ‖₂ = {} above {}", rep.tau_norm, rep.tau_in_bound));
        parts.push(format!("n={n}: ‖τ‖₂={:.4} ≤ {:.2}", rep.tau_norm, rep.tau_in_bound));
        norms.push((n, rep.tau_norm));
    }
    for w in norms.windows(2) {
        t.check(w[1].1 < w[0].1, || format!("‖τ‖₂ not decreasing: {} (n={}) → {} (n={})", w[0].1, w[0].0, w[1].1, w[1].0));
    }
    Ok(t.finish(7, "τ-norm decay", parts.join("; "), start))
}

pub fn witness_criterion(c0_max: usize, l1_max: usize, l1_direct_max: usize) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut t = Tally::new();
    let root = LampLabel::identity();
    for n in 0..=c0_max {
        let w = witness_c0(&Lamplighter, &root, n, DEFAULT_VERTEX_BUDGET)?;
        t.check(w.pass && w.root_value == 1.0, || format!("c₀ n={n}: sup gradient {}/{}", w.sup_gradient_numerator, n + 1));
    }
    let rho = lamplighter_return(l1_max + 1, 0.0);
    t.check(rho.loss.iter().all(|&l| l == 0.0), || "return series not exact".into());
    let mut worst = 0.0f64;
    for n in 0..=l1_max {
        let w = witness_l1_from_return(n, rho.rho[n + 1]);
        worst = worst.max(w.laplacian_l1 * (n + 1) as f64 / 2.0);
        t.check(w.pass, || format!("ℓ¹ n={n}: {} > {}", w.laplacian_l1, w.bound));
        if n <= l1_direct_max {
            let d = witness_l1_lazy(&Lamplighter, &root, n, DEFAULT_VERTEX_BUDGET)?;
            t.check(d.pass && (d.mass - 1.0).abs() < 1e-12, || format!("ℓ¹ n={n} direct: {} > {} or mass {}", d.laplacian_l1, d.bound, d.mass));
            t.check((d.laplacian_l1 - w.laplacian_l1).abs() < 1e-12, || format!("ℓ¹ n={n}: direct {} vs return-identity {}", d.laplacian_l1, w.laplacian_l1));
        }
    }
    let summary = format!("c₀ witness n ≤ {c0_max}; ℓ¹ witness n ≤ {l1_max} (direct iteration n ≤ {l1_direct_max}), max ‖Δf_n‖₁·(n+1)/2 = {worst:.6}");
    Ok(t.finish(8, "witness sequences", summary, start))
}

pub fn tree_ray_criterion(max_m: usize, exhaustive_m: usize) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut t = Tally::new();
    let tr = tree_ray_graph(max_m, 0)?;
    for m in 1..=max_m {
        let set = &tr.subtrees[m - 1];
        let size = set.len();
        let b = boundary_size(&tr.graph, set);
        let expected = (1usize << m) - 1;
        t.check(size == expected && Ratio::new(b, size) == Ratio::new(1, expected), || format!("m={m}: ratio {b}/{size}"));
    }
    let small = tree_ray_graph(exhaustive_m, 0)?;
    let profile = profile_exact(&small.graph, (1 << exhaustive_m) - 1)?;
    for m in 1..=exhaustive_m {
        let x = (1usize << m) - 1;
        let i = profile.sizes.iter().position(|&s| s == x).expect("size covered");
        t.check(profile.exact[i] && profile.boundary[i] == 1, || format!("m={m}: exhaustive minimum boundary {} at size {x}", profile.boundary[i]));
    }
    let summary = format!("𝔊(2^m-1) = 1/(2^m-1) for m ≤ {max_m}; optimal by exhaustion for m ≤ {exhaustive_m}");
    Ok(t.finish(9, "tree-ray profile", summary, start))
}

pub fn gamma_criterion(with_lamplighter: bool) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut t = Tally::new();
    let a: Vec<f64> = (0..=400).map(|k| (-(k as f64).sqrt()).exp()).collect();
    let fa = fit_gamma(&a, 10, 400, false)?;
    t.check((fa.gamma - 0.5).abs() <= 0.02, || format!("exp(-k^0.5): γ̂ = {}", fa.gamma));
    let b: Vec<f64> = (0..=400).map(|k| 0.9 * (-2.0 * (k as f64).cbrt()).exp()).collect();
    let fb = fit_gamma(&b, 10, 400, false)?;
    t.check((fb.gamma - 1.0 / 3.0).abs() <= 0.02, || format!("0.9·exp(-2k^(1/3)): γ̂ = {}", fb.gamma));
    let mut summary = format!("synthetic γ̂ = {:.4}, {:.4}", fa.gamma, fb.gamma);
    if with_lamplighter {
        let series = lamplighter_return(2000, 1e-6);
        let loss = series.loss[100..].iter().fold(0.0f64, |m, &l| m.max(l));
        t.check(loss < 1e-6, || format!("truncation loss {loss:e}"));
        let f = fit_gamma(&series.rho, 100, 2000, series.bipartite)?;
        t.check((0.2..=0.5).contains(&f.gamma), || format!("lamplighter γ̂ = {}", f.gamma));
        summary.push_str(&format!("; lamplighter k ∈ [100, 2000]: γ̂ = {:.4}, truncation loss {loss:.1e}", f.gamma));
    }
    Ok(t.finish(10, "decay exponent fit", summary, start))
}

/// Runs the battery. `quick` keeps to the graphs with at most 10 vertices
/// (criteria 1, 2, 5, 6) plus small instances of the rest.
pub fn run_suite(quick: bool, seed: u64, mut progress: impl FnMut(&CriterionResult)) -> Result<SuiteReport> {
    let mut criteria = Vec::new();
    let mut push = |r: CriterionResult| {
        progress(&r);
        criteria.push(r);
    };
    push(chain_criterion()?);
    push(cheeger_criterion()?);
    if quick {
        push(lamplighter_count_criterion(3)?);
    } else {
        push(lamplighter_count_criterion(12)?);
        push(counterexample_criterion(&[10, 15, 20], 5)?);
    }
    push(folner_criterion(seed)?);
    push(transport_criterion(seed, if quick { 120 } else { 1000 })?);
    if !quick {
        push(decay_criterion(&[6, 8, 10, 12], seed)?);
        push(witness_criterion(8, 50, 12)?);
    }
    push(tree_ray_criterion(if quick { 3 } else { 10 }, 3)?);
    push(gamma_criterion(!quick)?);
    Ok(SuiteReport { quick, seed, criteria })
}
