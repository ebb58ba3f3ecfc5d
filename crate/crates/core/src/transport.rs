//! Transport patterns: edge functions whose divergence moves one measure to
//! another, the Laplacian-inversion construction, the Følner escape radius
//! and the two-part transport of a walk difference.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{bfs_distances, boundary_size, induced_subgraph, FiniteGraph, VertexSubset, UNREACHED};
use crate::isoperimetry::inradius_and_depth;
use crate::linalg::{cg_zero_sum, laplacian_into, lanczos_smallest_nonzero};
use crate::operators::{compensated_sum, conjugate, divergence, gradient, lp_norm_unchecked, p_bar, pairing, walk_push};
use crate::spectral::{cheeger_exact, cheeger_heuristic, lambda2_exact};
use crate::subsets::EXHAUSTIVE_THRESHOLD;

fn l1(x: &[f64]) -> f64 {
    compensated_sum(x.iter().map(|v| v.abs()))
}

fn linf(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Positive and negative parts `(π₊, π₋)` of a zero-sum measure.
pub fn split_measure(pi: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let total = compensated_sum(pi.iter().copied());
    if total.abs() > 1e-12 * l1(pi).max(1.0) {
        return Err(Error::InvalidArgument(format!("measure sums to {total:e}, expected 0")));
    }
    Ok((pi.iter().map(|&x| x.max(0.0)).collect(), pi.iter().map(|&x| (-x).max(0.0)).collect()))
}

/// `τ` with `∇*τ = target - source`.
#[derive(Clone, Debug, Serialize)]
pub struct TransportPattern {
    pub tau: Vec<f64>,
    pub source: Vec<f64>,
    pub target: Vec<f64>,
}

impl TransportPattern {
    /// Checks the divergence identity to `1e-12·scale` and wraps the data.
    pub fn new(g: &FiniteGraph, tau: Vec<f64>, source: Vec<f64>, target: Vec<f64>) -> Result<Self> {
        let t = TransportPattern { tau, source, target };
        let res = t.residual(g);
        if res > 1e-12 * t.scale(g) {
            return Err(Error::Verification(format!("divergence identity off by {res:e}")));
        }
        Ok(t)
    }

    /// `‖∇*τ - (target - source)‖_∞`.
    pub fn residual(&self, g: &FiniteGraph) -> f64 {
        let div = divergence(g, &self.tau);
        div.iter().zip(&self.target).zip(&self.source).map(|((d, t), s)| (d - (t - s)).abs()).fold(0.0, f64::max)
    }

    pub fn scale(&self, g: &FiniteGraph) -> f64 {
        (linf(&self.tau) * g.max_degree() as f64).max(linf(&self.source)).max(linf(&self.target)).max(1.0)
    }

    pub fn norm(&self, p: f64) -> f64 {
        lp_norm_unchecked(&self.tau, p)
    }

    /// Adds another pattern on the same graph.
    pub fn plus(&self, other: &TransportPattern) -> TransportPattern {
        let add = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        TransportPattern { tau: add(&self.tau, &other.tau), source: add(&self.source, &other.source), target: add(&self.target, &other.target) }
    }

    /// `u,v,flow` rows for the nonzero edges, flow read from `u` to `v`.
    pub fn to_csv(&self, g: &FiniteGraph) -> String {
        let mut s = String::from("u,v,flow\n");
        for (e, &t) in self.tau.iter().enumerate() {
            if t != 0.0 {
                let (a, b) = g.edge(e);
                s.push_str(&format!("{a},{b},{t:e}\n"));
            }
        }
        s
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PairingBound {
    /// `⟨f, target - source⟩`.
    pub exact_diff: f64,
    /// `⟨∇f, τ⟩`.
    pub gradient_pairing: f64,
    /// `‖∇f‖_p ‖τ‖_{p'}`.
    pub bound: f64,
}

/// Evaluates `⟨f, μ - ξ⟩ = ⟨∇f, τ⟩ ≤ ‖∇f‖_p ‖τ‖_{p'}` and fails if either
/// relation is off by more than `1e-9·scale`.
pub fn pairing_bound(g: &FiniteGraph, f: &[f64], t: &TransportPattern, p: f64) -> Result<PairingBound> {
    crate::operators::check_exponent(p)?;
    let diff: Vec<f64> = t.target.iter().zip(&t.source).map(|(a, b)| a - b).collect();
    let grad = gradient(g, f);
    let exact_diff = pairing(f, &diff);
    let gradient_pairing = pairing(&grad, &t.tau);
    let bound = lp_norm_unchecked(&grad, p) * lp_norm_unchecked(&t.tau, conjugate(p));
    let scale = (linf(f) * l1(&diff)).max(linf(&grad) * l1(&t.tau)).max(1.0);
    if (exact_diff - gradient_pairing).abs() > 1e-9 * scale {
        return Err(Error::Verification(format!("pairing identity off: {exact_diff} vs {gradient_pairing}")));
    }
    if exact_diff > bound + 1e-9 * scale {
        return Err(Error::Verification(format!("Hölder bound violated: {exact_diff} > {bound}")));
    }
    Ok(PairingBound { exact_diff, gradient_pairing, bound })
}

/// Sends `mass` along `path`.
pub fn path_pattern(g: &FiniteGraph, path: &[usize], mass: f64) -> Result<TransportPattern> {
    let (first, last) = match (path.first(), path.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::InvalidArgument("empty path".into())),
    };
    let n = g.vertex_count();
    if path.iter().any(|&v| v >= n) {
        return Err(Error::InvalidArgument("path vertex out of range".into()));
    }
    let mut tau = vec![0.0; g.edge_count()];
    for w in path.windows(2) {
        let e = g.edge_id(w[0], w[1]).ok_or_else(|| Error::InvalidArgument(format!("{} and {} are not adjacent", w[0], w[1])))?;
        tau[e] += if w[0] < w[1] { mass } else { -mass };
    }
    let mut source = vec![0.0; n];
    let mut target = vec![0.0; n];
    source[first] += mass;
    target[last] += mass;
    TransportPattern::new(g, tau, source, target)
}

#[derive(Clone, Debug, Serialize)]
pub struct PotentialSolve {
    pub pattern: TransportPattern,
    /// `‖Δ_F h - g‖₂ / ‖g‖₂`.
    pub residual: f64,
    pub iterations: usize,
}

/// Solves `Δ_F h = g` on the graph induced by `set` and returns `τ = ∇_F h`
/// (zero off `F`), a pattern from `g₋` to `g₊`.
pub fn potential_pattern(host: &FiniteGraph, set: &VertexSubset, g: &[f64], tol: f64) -> Result<PotentialSolve> {
    let n = host.vertex_count();
    if g.len() != n || set.universe() != n {
        return Err(Error::InvalidArgument("vertex function and set must live on the host".into()));
    }
    if let Some(v) = (0..n).find(|&v| g[v] != 0.0 && !set.contains(v)) {
        return Err(Error::InvalidArgument(format!("g is nonzero at {v} outside the set")));
    }
    let (sub, map) = induced_subgraph(host, set)?;
    if !sub.is_connected() {
        return Err(Error::Disconnected);
    }
    let local: Vec<f64> = map.iter().map(|&v| g[v]).collect();
    let total = compensated_sum(local.iter().copied());
    if total.abs() > 1e-12 * l1(&local).max(1.0) {
        return Err(Error::InvalidArgument(format!("g sums to {total:e}, expected 0")));
    }
    let max_iter = (20 * map.len()).max(1000);
    let out = cg_zero_sum(|x, o| laplacian_into(&sub, x, o), &local, tol, max_iter);
    if !out.converged {
        return Err(Error::NoConvergence { iterations: out.iterations, residual: out.residual });
    }
    let mut tau = vec![0.0; host.edge_count()];
    for &(a, b) in sub.edges() {
        // map is increasing, so host orientation matches
        let e = host.edge_id(map[a], map[b]).expect("induced edge present in host");
        tau[e] = out.x[b] - out.x[a];
    }
    let (plus, minus) = split_measure(g)?;
    let pattern = TransportPattern::new(host, tau, minus, plus)?;
    Ok(PotentialSolve { pattern, residual: out.residual, iterations: out.iterations })
}

/// Exact escape profile `m_t = ‖P^t 1_F‖_∞` on a `d`-regular ambient graph,
/// kept as `max_x u_t(x)` with `u_t = d^t P^t 1_F`.
#[derive(Clone, Debug)]
pub struct EscapeProfile {
    pub d: usize,
    pub size: usize,
    pub boundary: usize,
    maxima: Vec<BigUint>,
    u: Vec<BigUint>,
}

impl EscapeProfile {
    /// Starts at `t = 0`. Every vertex of the host whose degree is below `d`
    /// is treated as truncated: the iteration stops with an error once mass
    /// reaches it.
    pub fn new(host: &FiniteGraph, set: &VertexSubset, d: usize) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::InvalidArgument("empty set".into()));
        }
        if set.iter().any(|v| host.degree(v) != d) {
            return Err(Error::NotInterior("set touches the window edge".into()));
        }
        let boundary = boundary_size(host, set);
        if boundary == 0 {
            return Err(Error::InvalidArgument("set has empty boundary; mass never leaves".into()));
        }
        let u = (0..host.vertex_count()).map(|v| if set.contains(v) { BigUint::one() } else { BigUint::zero() }).collect();
        Ok(EscapeProfile { d, size: set.len(), boundary, maxima: vec![BigUint::one()], u })
    }

    pub fn steps(&self) -> usize {
        self.maxima.len() - 1
    }

    fn advance(&mut self, host: &FiniteGraph) -> Result<()> {
        let n = host.vertex_count();
        if let Some(v) = (0..n).find(|&v| host.degree(v) < self.d && !self.u[v].is_zero()) {
            return Err(Error::NotInterior(format!("walk reached the window edge at vertex {v} after {} steps; enlarge the margin", self.steps())));
        }
        let mut next = vec![BigUint::zero(); n];
        let mut max = BigUint::zero();
        for (v, slot) in next.iter_mut().enumerate() {
            for &w in host.neighbors(v) {
                if !self.u[w].is_zero() {
                    *slot += &self.u[w];
                }
            }
            if *slot > max {
                max = slot.clone();
            }
        }
        self.u = next;
        self.maxima.push(max);
        Ok(())
    }

    /// `m_t` as an exact rational.
    pub fn max_at(&self, t: usize) -> BigRational {
        BigRational::new(BigInt::from(self.maxima[t].clone()), BigInt::from(BigUint::from(self.d).pow(t as u32)))
    }

    pub fn max_f64(&self, t: usize) -> f64 {
        self.max_at(t).to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest `t ≤ max_steps` with `m_t ≤ 1 - ε`, extending the iteration.
    pub fn radius(&mut self, host: &FiniteGraph, eps: &BigRational, max_steps: usize) -> Result<Option<usize>> {
        let level = BigRational::one() - eps;
        let mut t = 0;
        loop {
            if t > self.steps() {
                self.advance(host)?;
            }
            if self.max_at(t) <= level {
                return Ok(Some(t));
            }
            if t >= max_steps {
                return Ok(None);
            }
            t += 1;
        }
    }
}

pub fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidArgument(format!("{x} is not finite")))
}

#[derive(Clone, Debug, Serialize)]
pub struct FolnerRadius {
    pub eps: f64,
    pub r: usize,
    /// `(d/2) ε |F| / |∂F|`.
    pub bound: f64,
    /// Exact `2 r |∂F| ≥ d ε |F|`.
    pub pass: bool,
}

fn lemma_holds(profile: &EscapeProfile, r: usize, eps: &BigRational) -> bool {
    let lhs = BigRational::from_integer(BigInt::from(2 * r as u64 * profile.boundary as u64));
    let rhs = eps * BigRational::from_integer(BigInt::from(profile.d as u64 * profile.size as u64));
    lhs >= rhs
}

/// Smallest `r` with `‖P^r 1_F‖_∞ ≤ 1 - ε`, with the exact check of
/// `r ≥ (d/2) ε |F|/|∂F|`. `None` when not reached within `max_steps`.
pub fn folner_radius(host: &FiniteGraph, set: &VertexSubset, d: usize, eps: f64, max_steps: usize) -> Result<Option<FolnerRadius>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("ε = {eps} must lie in (0, 1)")));
    }
    let mut profile = EscapeProfile::new(host, set, d)?;
    let e = rational(eps)?;
    Ok(profile.radius(host, &e, max_steps)?.map(|r| FolnerRadius {
        eps,
        r,
        bound: d as f64 / 2.0 * eps * profile.size as f64 / profile.boundary as f64,
        pass: lemma_holds(&profile, r, &e),
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct FolnerRecord {
    pub size: usize,
    pub boundary: usize,
    pub d: usize,
    /// `m_t = ‖P^t 1_F‖_∞` for the computed steps.
    pub escape: Vec<f64>,
    /// `(ε, r_F(ε))` on the grid `2^-1 .. 2^-40`.
    pub grid: Vec<(f64, usize)>,
    /// Supremum of `{ε : r_F(ε) ≤ 1/√ε}`, computed exactly.
    pub eps0: f64,
    /// Bisection bracket around `eps0` on the grid predicate.
    pub eps0_interval: (f64, f64),
    pub r0: usize,
    /// Exact `r₀ ≥ (d/2) ε₀ |F|/|∂F|`.
    pub lemma_at_eps0: bool,
    /// Exact `r₀ (r₀+1)² ≥ (d/2) |F|/|∂F|`.
    pub r0_bound: bool,
    /// `r₀³ ≥ (d/2) |F|/|∂F|`, which presumes `ε₀ = 1/r₀²`.
    pub r0_cubed_bound: bool,
}

/// The crossing of `ε ↦ r_F(ε)` with `ε ↦ 1/√ε`.
pub fn eps0_r0(host: &FiniteGraph, set: &VertexSubset, d: usize, max_steps: usize) -> Result<FolnerRecord> {
    let mut profile = EscapeProfile::new(host, set, d)?;
    // r_F(ε) = t on (1 - m_{t-1}, 1 - m_t]; the piece meets ε ≤ 1/t² iff 1 - m_{t-1} < 1/t²
    let mut best: Option<BigRational> = None;
    let mut t = 1;
    loop {
        if t > max_steps {
            return Err(Error::NoConvergence { iterations: t, residual: f64::NAN });
        }
        while profile.steps() < t {
            profile.advance(host)?;
        }
        let cap = BigRational::new(BigInt::one(), BigInt::from(t * t));
        let lo = BigRational::one() - profile.max_at(t - 1);
        if lo >= cap {
            break;
        }
        let hi = BigRational::one() - profile.max_at(t);
        if hi > lo {
            let cand = if hi < cap { hi } else { cap };
            if best.as_ref().is_none_or(|b| &cand > b) {
                best = Some(cand);
            }
        }
        t += 1;
    }
    let eps0 = best.ok_or_else(|| Error::Verification("no ε with r_F(ε) ≤ 1/√ε".into()))?;
    let r0 = profile.radius(host, &eps0, max_steps)?.expect("r_F(ε₀) lies in the computed range");

    // past 1 - m_{t-1} the predicate is false (r_F ≥ t > 1/√ε); below 1 - m_t it is decided
    let settled = BigRational::one() - profile.max_at(t - 1);
    let known = BigRational::one() - profile.max_at(profile.steps());
    let predicate = |profile: &mut EscapeProfile, e: f64| -> Result<bool> {
        let e = rational(e)?;
        if e > settled {
            return Ok(false);
        }
        let r = profile.radius(host, &e, max_steps)?;
        Ok(r.is_some_and(|r| BigRational::from_integer(BigInt::from(r * r)) * &e <= BigRational::one()))
    };
    let mut grid = Vec::new();
    for k in 1..=40 {
        let e = 0.5f64.powi(k);
        if rational(e)? <= known {
            grid.push((e, profile.radius(host, &rational(e)?, max_steps)?.expect("within computed steps")));
        }
    }
    // predicate holds for small ε and fails for large ε
    let (mut lo, mut hi) = (0.0, 0.5f64.powi(40));
    for k in 1..=40 {
        let e = 0.5f64.powi(k);
        if predicate(&mut profile, e)? {
            lo = e;
            hi = if k == 1 { 1.0 } else { 2.0 * e };
            break;
        }
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if predicate(&mut profile, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let ratio = |k: u64| BigInt::from(k);
    let size = profile.size as u64;
    let boundary = profile.boundary as u64;
    let r = r0 as u64;
    let r0_bound = ratio(2 * r * (r + 1) * (r + 1) * boundary) >= ratio(d as u64 * size);
    let r0_cubed_bound = ratio(2 * r * r * r * boundary) >= ratio(d as u64 * size);
    let escape = (0..=profile.steps()).map(|t| profile.max_f64(t)).collect();
    Ok(FolnerRecord {
        size: profile.size,
        boundary: profile.boundary,
        d,
        escape,
        grid,
        eps0: eps0.to_f64().unwrap_or(f64::NAN),
        eps0_interval: (lo, hi),
        r0,
        lemma_at_eps0: lemma_holds(&profile, r0, &eps0),
        r0_bound,
        r0_cubed_bound,
    })
}

/// Runs `f` on windows of growing margin until it stops asking for one.
pub fn with_growing_margin<W, T>(
    mut build: impl FnMut(usize) -> Result<W>,
    mut f: impl FnMut(&W) -> Result<T>,
    start: usize,
    max_margin: usize,
) -> Result<(T, usize)> {
    let mut margin = start.max(1);
    loop {
        let w = build(margin)?;
        match f(&w) {
            Err(Error::NotInterior(_)) if margin < max_margin => margin = (2 * margin).min(max_margin),
            other => return other.map(|t| (t, margin)),
        }
    }
}

/// Start pair for the Følner variant: `y ∈ F` maximizing `P^{r₀-1} 1_F` and
/// its best neighbour `x ∈ F`. Returns `(y, x, r₀)`.
pub fn folner_pair(host: &FiniteGraph, set: &VertexSubset, d: usize) -> Result<(usize, usize, usize)> {
    let rec = eps0_r0(host, set, d, 10_000)?;
    let mut kept: Vec<f64> = (0..host.vertex_count()).map(|v| if set.contains(v) { 1.0 } else { 0.0 }).collect();
    for _ in 1..rec.r0 {
        kept = crate::operators::walk_apply(host, &kept);
    }
    let y = set.iter().fold(None, |best: Option<usize>, v| match best {
        Some(b) if kept[b] >= kept[v] => Some(b),
        _ => Some(v),
    });
    let y = y.expect("nonempty set");
    let x = host.neighbors(y).iter().copied().filter(|&u| set.contains(u)).fold(None, |best: Option<usize>, u| match best {
        Some(b) if kept[b] >= kept[u] => Some(b),
        _ => Some(u),
    });
    let x = x.ok_or_else(|| Error::InvalidArgument("F has an isolated vertex".into()))?;
    Ok((y, x, rec.r0))
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub enum PipelineMode {
    /// `r = inrad(F) - 1`; the walks stay inside `F`.
    Radial,
    /// `r = r₀(F) - 1`; escaped mass is routed back into `F`.
    Folner,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub mode: PipelineMode,
    pub p: f64,
    pub v: usize,
    pub w: usize,
    pub steps: usize,
    pub r0: Option<usize>,
    /// `‖P^r δ_v‖_∞`, `‖P^r δ_w‖_∞`.
    pub sup_v: f64,
    pub sup_w: f64,
    /// Mass of `P^r δ_v`, `P^r δ_w` outside `F`.
    pub escaped_v: f64,
    pub escaped_w: f64,
    pub g_norm: f64,
    /// `‖P^r δ_v‖_∞^{1/q} + ‖P^r δ_w‖_∞^{1/q}`, `q = p/(p-1)`.
    pub g_bound: f64,
    pub tau_in_norm: f64,
    pub tau_out_norm: f64,
    pub tau_norm: f64,
    /// Same three norms in the conjugate exponent.
    pub tau_in_norm_conj: f64,
    pub tau_out_norm_conj: f64,
    pub tau_norm_conj: f64,
    /// `Σ |g(u)| d(u, F)` over escaped mass.
    pub out_l1_cost: f64,
    /// `(2r₀+1) ‖g off F‖₁`.
    pub out_l1_bound: f64,
    pub lambda2: f64,
    pub lambda2_residual: f64,
    /// `p̄ ‖g_F‖_p / (2 λ₂(F))` with `λ₂` lowered by its residual.
    pub tau_in_bound: f64,
    pub kappa1: f64,
    pub kappa1_exact: bool,
    /// `2 q d³ κ₁(F)^{-2} max ‖P^r δ‖_∞^{1/q}`.
    pub kappa_bound: f64,
    pub cg_residual: f64,
    pub divergence_residual: f64,
    pub checks: Vec<(String, bool)>,
    /// The assembled pattern `τ_in + τ_out`.
    #[serde(skip)]
    pub pattern: TransportPattern,
}

impl PipelineReport {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }

    /// `|⟨f, δ_v - δ_w⟩|`-type bound `‖∇f‖_{p'} ‖τ‖_p` for a test function.
    pub fn implied_bound(&self, grad_norm_conj: f64) -> f64 {
        grad_norm_conj * self.tau_norm
    }
}

fn walk(host: &FiniteGraph, start: usize, steps: usize) -> Vec<f64> {
    let mut mu = vec![0.0; host.vertex_count()];
    mu[start] = 1.0;
    for _ in 0..steps {
        mu = walk_push(host, &mu);
    }
    mu
}

/// Transport pattern for `P^r(δ_w - δ_v)` on a window around `F`, with the
/// norm bounds of the Laplacian-inversion argument. `d` is the ambient
/// degree.
#[allow(clippy::too_many_arguments)]
pub fn harmonic_difference_pipeline(
    host: &FiniteGraph,
    set: &VertexSubset,
    d: usize,
    v: usize,
    w: usize,
    p: f64,
    mode: PipelineMode,
    seed: u64,
) -> Result<PipelineReport> {
    crate::operators::check_exponent(p)?;
    if p == 1.0 || p.is_infinite() {
        return Err(Error::InvalidArgument("pipeline needs 1 < p < ∞".into()));
    }
    if host.edge_id(v, w).is_none() {
        return Err(Error::InvalidArgument(format!("{v} and {w} are not adjacent")));
    }
    if !set.contains(v) || !set.contains(w) {
        return Err(Error::InvalidArgument("v and w must lie in F".into()));
    }
    let (inrad, _) = inradius_and_depth(host, set);
    let inrad = inrad.ok_or_else(|| Error::NotInterior("F has no outside neighbour".into()))?;
    let (steps, r0) = match mode {
        PipelineMode::Radial => {
            let r = inrad.checked_sub(1).ok_or_else(|| Error::InvalidArgument("inradius 0 leaves no room".into()))? as usize;
            let depth = crate::isoperimetry::depth_to_complement(host, set);
            for x in [v, w] {
                if (depth[x] as usize) < r + 1 {
                    return Err(Error::NotInterior(format!("ball of radius {r} around {x} leaves F (depth {})", depth[x])));
                }
            }
            (r, None)
        }
        PipelineMode::Folner => {
            let rec = eps0_r0(host, set, d, 10_000)?;
            (rec.r0.saturating_sub(1), Some(rec.r0))
        }
    };
    let q = conjugate(p);
    let mv = walk(host, v, steps);
    let mw = walk(host, w, steps);
    let g: Vec<f64> = mw.iter().zip(&mv).map(|(a, b)| a - b).collect();
    let n = host.vertex_count();
    let off = |mu: &[f64]| compensated_sum((0..n).filter(|&x| !set.contains(x)).map(|x| mu[x]));
    let escaped_v = off(&mv);
    let escaped_w = off(&mw);
    if let Some(x) = (0..n).find(|&x| g[x] != 0.0 && host.degree(x) < d) {
        return Err(Error::NotInterior(format!("walk reached the window edge at {x}")));
    }

    // escaped mass: route each outside vertex to its nearest F vertex
    let in_f: Vec<usize> = set.iter().collect();
    let dist = bfs_distances(host, &in_f, None);
    let mut tau_out = vec![0.0; host.edge_count()];
    let mut g_in = g.clone();
    let mut out_l1_cost = 0.0;
    let mut out_mass = 0.0;
    for u in 0..n {
        if set.contains(u) || g[u] == 0.0 {
            continue;
        }
        if dist[u] == UNREACHED {
            return Err(Error::Disconnected);
        }
        let mut path = vec![u];
        let mut x = u;
        while dist[x] > 0 {
            x = *host.neighbors(x).iter().find(|&&y| dist[y] + 1 == dist[x]).expect("BFS predecessor");
            path.push(x);
        }
        path.reverse();
        // flow g(u) from the F endpoint out to u
        for s in path.windows(2) {
            let e = host.edge_id(s[0], s[1]).unwrap();
            tau_out[e] += if s[0] < s[1] { g[u] } else { -g[u] };
        }
        out_l1_cost += g[u].abs() * (path.len() - 1) as f64;
        out_mass += g[u].abs();
        g_in[x] += g[u];
        g_in[u] = 0.0;
    }

    let solve = potential_pattern(host, set, &g_in, 1e-12)?;
    let tau: Vec<f64> = solve.pattern.tau.iter().zip(&tau_out).map(|(a, b)| a + b).collect();
    let (plus, minus) = split_measure(&g)?;
    let full = TransportPattern::new(host, tau, minus, plus)?;
    let divergence_residual = full.residual(host);

    let (sub, _) = induced_subgraph(host, set)?;
    let (lambda2, lambda2_residual) = if sub.vertex_count() <= 1500 {
        (lambda2_exact(&sub, Some(d))?, 0.0)
    } else {
        let est = lanczos_smallest_nonzero(&sub, d as f64, 1e-10, 300, seed)?;
        (est.value, est.residual)
    };
    let g_in_f: Vec<f64> = set.iter().map(|x| g_in[x]).collect();
    let tau_in_bound = p_bar(p) * lp_norm_unchecked(&g_in_f, p) / (2.0 * (lambda2 - lambda2_residual));
    let (kappa1, kappa1_exact) = if sub.vertex_count() <= EXHAUSTIVE_THRESHOLD {
        (cheeger_exact(&sub)?.as_f64(), true)
    } else {
        (cheeger_heuristic(&sub)?.as_f64(), false)
    };
    let sup_v = linf(&mv);
    let sup_w = linf(&mw);
    let kappa_bound = 2.0 * q * (d as f64).powi(3) / (kappa1 * kappa1) * sup_v.max(sup_w).powf(1.0 / q);
    let g_bound = sup_v.powf(1.0 / q) + sup_w.powf(1.0 / q);
    let g_norm = lp_norm_unchecked(&g, p);
    let tau_in_norm = solve.pattern.norm(p);
    let mut checks = vec![
        ("‖g‖_p ≤ ‖P^r δ_v‖_∞^{1/q} + ‖P^r δ_w‖_∞^{1/q}".to_string(), g_norm <= g_bound * (1.0 + 1e-12)),
        ("CG residual < 1e-10".to_string(), solve.residual < 1e-10),
        ("τ_in within the λ₂ bound".to_string(), tau_in_norm <= tau_in_bound * (1.0 + 1e-9)),
    ];
    if let Some(r0) = r0 {
        let bound = (2 * r0 + 1) as f64 * out_mass;
        checks.push(("escaped ℓ¹ cost ≤ (2r₀+1)·escaped mass".to_string(), out_l1_cost <= bound * (1.0 + 1e-12)));
    }
    Ok(PipelineReport {
        mode,
        p,
        v,
        w,
        steps,
        r0,
        sup_v,
        sup_w,
        escaped_v,
        escaped_w,
        g_norm,
        g_bound,
        tau_in_norm,
        tau_out_norm: lp_norm_unchecked(&tau_out, p),
        tau_norm: full.norm(p),
        tau_in_norm_conj: solve.pattern.norm(q),
        tau_out_norm_conj: lp_norm_unchecked(&tau_out, q),
        tau_norm_conj: full.norm(q),
        out_l1_cost,
        out_l1_bound: r0.map_or(0.0, |r| (2 * r + 1) as f64 * out_mass),
        lambda2,
        lambda2_residual,
        tau_in_bound,
        kappa1,
        kappa1_exact,
        kappa_bound,
        cg_residual: solve.residual,
        divergence_residual,
        checks,
        pattern: full,
    })
}
