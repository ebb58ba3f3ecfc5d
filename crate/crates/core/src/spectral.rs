//! Spectral gap, Cheeger constant, p-conductance and p-spectral gap.
//!
//! `κ_p` is the best constant in `‖∇f‖_p ≥ κ_p ‖f‖_p` and `λ_p` the best
//! constant in `‖Δf‖_p ≥ λ_p ‖f‖_p`, both over zero-sum `f`, with
//! `Δ = (D - A)/d`. Estimates of both are upper bounds (a witness attains the
//! reported quotient).

use nalgebra::DMatrix;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{FiniteGraph, VertexSubset};
use crate::linalg::{lanczos_smallest_nonzero, sorted_eigen, spectral_norm};
use crate::operators::{conjugate, divergence, gradient, lp_norm_unchecked, p_bar, project_zero_sum};
use crate::subsets::{for_each_subset, mask_lex_less, EXHAUSTIVE_THRESHOLD};

/// Graphs up to this size use dense eigensolves.
const DENSE_LIMIT: usize = 1500;

/// `(D - A) / d` as a dense matrix.
pub fn scaled_laplacian(g: &FiniteGraph, d: f64) -> DMatrix<f64> {
    let n = g.vertex_count();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for v in 0..n {
        m[(v, v)] = g.degree(v) as f64 / d;
        for &u in g.neighbors(v) {
            m[(v, u)] = -1.0 / d;
        }
    }
    m
}

/// Spectrum of `I - P` (ascending). Regular graphs and explicit ambient
/// degree use `(D - A)/d`; otherwise the normalized Laplacian, which is
/// similar to `I - P`.
pub fn walk_laplacian_spectrum(g: &FiniteGraph, ambient_degree: Option<usize>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let m = match (ambient_degree, g.regular_degree()) {
        (Some(d), _) | (None, Some(d)) => {
            if d == 0 {
                return Err(Error::InvalidGraph("degree zero".into()));
            }
            scaled_laplacian(g, d as f64)
        }
        (None, None) => {
            let n = g.vertex_count();
            let mut m = DMatrix::<f64>::identity(n, n);
            for v in 0..n {
                for &u in g.neighbors(v) {
                    m[(v, u)] = -1.0 / ((g.degree(v) * g.degree(u)) as f64).sqrt();
                }
            }
            m
        }
    };
    Ok(sorted_eigen(m))
}

/// Smallest nonzero eigenvalue of the walk Laplacian.
pub fn lambda2_exact(g: &FiniteGraph, ambient_degree: Option<usize>) -> Result<f64> {
    if g.vertex_count() < 2 {
        return Err(Error::InvalidArgument("λ₂ needs at least two vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.vertex_count() > DENSE_LIMIT {
        let d = ambient_degree.or(g.regular_degree()).ok_or(Error::NotRegular)?;
        return Ok(lanczos_smallest_nonzero(g, d as f64, 1e-11, 300, 0)?.value);
    }
    Ok(walk_laplacian_spectrum(g, ambient_degree)?.0[1])
}

/// `λ₂` of `(D - A)/d` by sparse shift-invert Lanczos, with its residual.
pub fn lambda2_sparse(g: &FiniteGraph, d: usize, seed: u64) -> Result<crate::linalg::EigenEstimate> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    lanczos_smallest_nonzero(g, d as f64, 1e-10, 400, seed)
}

#[derive(Clone, Debug)]
pub struct CheegerResult {
    pub value: Ratio<u64>,
    pub witness: VertexSubset,
}

impl CheegerResult {
    pub fn as_f64(&self) -> f64 {
        *self.value.numer() as f64 / *self.value.denom() as f64
    }
}

/// Exact Cheeger constant `min |∂F|/|F|` over `0 < |F| ≤ |V|/2`. Ties go to
/// the smaller set, then the lexicographically smaller member list.
pub fn cheeger_exact(g: &FiniteGraph) -> Result<CheegerResult> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::InvalidArgument("Cheeger constant needs at least two vertices".into()));
    }
    let mut best: Option<(usize, usize, u64)> = None;
    for_each_subset(g, EXHAUSTIVE_THRESHOLD, |mask, size, b| {
        if 2 * size > n {
            return;
        }
        let better = match best {
            None => true,
            Some((bb, bs, bm)) => {
                let (l, r) = (b * bs, bb * size);
                l < r || (l == r && (size < bs || (size == bs && mask_lex_less(mask, bm))))
            }
        };
        if better {
            best = Some((b, size, mask));
        }
    })?;
    let (b, s, mask) = best.expect("at least one admissible subset");
    Ok(CheegerResult { value: Ratio::new(b as u64, s as u64), witness: VertexSubset::from_mask(n, mask) })
}

/// Ascending-sort order of a vector, ties by index.
fn order_by(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx
}

/// Eigenvector of the second smallest eigenvalue of `D - A`.
pub fn fiedler_vector(g: &FiniteGraph, seed: u64) -> Result<Vec<f64>> {
    if g.vertex_count() <= DENSE_LIMIT {
        let (_, vecs) = sorted_eigen(scaled_laplacian(g, 1.0));
        Ok(vecs[1].clone())
    } else {
        Ok(lanczos_smallest_nonzero(g, 1.0, 1e-8, 300, seed)?.vector)
    }
}

/// Upper bound on the Cheeger constant: best sweep cut of the Fiedler vector,
/// then single-vertex moves while they strictly improve the ratio.
pub fn cheeger_heuristic(g: &FiniteGraph) -> Result<CheegerResult> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::InvalidArgument("Cheeger constant needs at least two vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let fiedler = fiedler_vector(g, 0)?;
    let mut best_set = vec![false; n];
    let mut best = (u64::MAX, 1u64);
    let asc = order_by(&fiedler);
    for order in [asc.clone(), asc.into_iter().rev().collect::<Vec<_>>()] {
        let mut member = vec![false; n];
        let mut boundary = 0usize;
        for (k, &v) in order.iter().enumerate().take(n / 2) {
            let inside = g.neighbors(v).iter().filter(|&&u| member[u]).count();
            boundary = boundary + g.degree(v) - 2 * inside;
            member[v] = true;
            let size = k + 1;
            if (boundary as u64) * best.1 < best.0 * size as u64 {
                best = (boundary as u64, size as u64);
                best_set.clone_from(&member);
            }
        }
    }
    // local refinement
    let mut member = best_set;
    let (mut b, mut s) = best;
    let mut inside_count: Vec<usize> = (0..n).map(|v| g.neighbors(v).iter().filter(|&&u| member[u]).count()).collect();
    for _round in 0..200 {
        let mut improved = false;
        for v in 0..n {
            let deg = g.degree(v) as u64;
            let inside = inside_count[v] as u64;
            let (nb, ns) = if member[v] {
                if s == 1 {
                    continue;
                }
                (b + 2 * inside - deg, s - 1)
            } else {
                if 2 * (s + 1) > n as u64 {
                    continue;
                }
                (b + deg - 2 * inside, s + 1)
            };
            if nb * s < b * ns {
                let add = !member[v];
                member[v] = add;
                for &u in g.neighbors(v) {
                    if add {
                        inside_count[u] += 1;
                    } else {
                        inside_count[u] -= 1;
                    }
                }
                b = nb;
                s = ns;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let witness = VertexSubset::from_members(n, (0..n).filter(|&v| member[v]))?;
    Ok(CheegerResult { value: Ratio::new(b, s), witness })
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizerSettings {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings { restarts: 32, seed: 0, max_iters: 3000 }
    }
}

#[derive(Clone, Debug)]
pub struct QuotientEstimate {
    pub value: f64,
    pub witness: Vec<f64>,
}

/// `ψ(x) = sign(x)|x|^{p-1}`.
fn signed_pow(x: f64, q: f64) -> f64 {
    x.signum() * x.abs().powf(q)
}

fn sum_pow(values: &[f64], p: f64) -> f64 {
    values.iter().map(|x| x.abs().powf(p)).sum()
}

fn normalize(f: &mut [f64]) -> bool {
    project_zero_sum(f);
    let n = f.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 || !n.is_finite() {
        return false;
    }
    f.iter_mut().for_each(|x| *x /= n);
    true
}

/// Gradient descent with Armijo backtracking of a scale-invariant log
/// quotient on the zero-sum unit sphere. Returns `(log quotient, point)`.
fn descend<E>(start: &[f64], eval: &E, max_iters: usize) -> Option<(f64, Vec<f64>)>
where
    E: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let mut f = start.to_vec();
    if !normalize(&mut f) {
        return None;
    }
    let (mut val, mut grad) = eval(&f);
    if !val.is_finite() {
        return None;
    }
    let mut alpha = 0.5;
    let mut stall = 0;
    for _ in 0..max_iters {
        let mut dir: Vec<f64> = grad.iter().map(|x| -x).collect();
        project_zero_sum(&mut dir);
        let dn2: f64 = dir.iter().map(|x| x * x).sum();
        if dn2 < 1e-32 {
            break;
        }
        let mut accepted = None;
        while alpha > 1e-18 {
            let mut trial: Vec<f64> = f.iter().zip(&dir).map(|(a, b)| a + alpha * b).collect();
            if normalize(&mut trial) {
                let (tv, tg) = eval(&trial);
                if tv.is_finite() && tv <= val - 1e-4 * alpha * dn2 {
                    accepted = Some((trial, tv, tg));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((trial, tv, tg)) = accepted else { break };
        let gain = val - tv;
        f = trial;
        val = tv;
        grad = tg;
        alpha = (alpha * 2.0).min(1e3);
        if gain <= 1e-15 * val.abs().max(1.0) {
            stall += 1;
            if stall >= 8 {
                break;
            }
        } else {
            stall = 0;
        }
    }
    Some((val, f))
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("p = {p} must lie in (1, ∞)")));
    }
    Ok(())
}

fn check_connected(g: &FiniteGraph) -> Result<()> {
    if g.vertex_count() < 2 {
        return Err(Error::InvalidArgument("need at least two vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// `‖∇f‖_p / ‖f‖_p`.
pub fn kappa_quotient(g: &FiniteGraph, f: &[f64], p: f64) -> f64 {
    lp_norm_unchecked(&gradient(g, f), p) / lp_norm_unchecked(f, p)
}

/// `‖Δf‖_p / ‖f‖_p` with `Δ = (D - A)/d`.
pub fn lambda_quotient(g: &FiniteGraph, d: f64, f: &[f64], p: f64) -> f64 {
    let lf = apply_scaled_laplacian(g, d, f);
    lp_norm_unchecked(&lf, p) / lp_norm_unchecked(f, p)
}

fn apply_scaled_laplacian(g: &FiniteGraph, d: f64, f: &[f64]) -> Vec<f64> {
    (0..g.vertex_count())
        .map(|v| g.neighbors(v).iter().map(|&u| f[v] - f[u]).sum::<f64>() / d)
        .collect()
}

/// Balanced indicator `|F^c| 1_F - |F| 1_{F^c}`.
pub fn balanced_indicator(set: &VertexSubset) -> Vec<f64> {
    let n = set.universe();
    let k = set.len() as f64;
    (0..n).map(|v| if set.contains(v) { n as f64 - k } else { -k }).collect()
}

fn starting_points(g: &FiniteGraph, settings: &OptimizerSettings, extra: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    let n = g.vertex_count();
    let mut starts = extra;
    if n <= 16 {
        let (_, vecs) = sorted_eigen(scaled_laplacian(g, 1.0));
        starts.extend(vecs.into_iter().skip(1));
    } else {
        starts.push(fiedler_vector(g, settings.seed)?);
    }
    let cut = if n <= EXHAUSTIVE_THRESHOLD { cheeger_exact(g)? } else { cheeger_heuristic(g)? };
    starts.push(balanced_indicator(&cut.witness));
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    for _ in 0..settings.restarts {
        starts.push((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
    }
    Ok(starts)
}

fn best_of<E, Q>(starts: &[Vec<f64>], eval: E, quotient: Q, max_iters: usize) -> Result<QuotientEstimate>
where
    E: Fn(&[f64]) -> (f64, Vec<f64>),
    Q: Fn(&[f64]) -> f64,
{
    let mut best: Option<QuotientEstimate> = None;
    for s in starts {
        if let Some((_, f)) = descend(s, &eval, max_iters) {
            let value = quotient(&f);
            if value.is_finite() && best.as_ref().is_none_or(|b| value < b.value) {
                best = Some(QuotientEstimate { value, witness: f });
            }
        }
    }
    best.ok_or_else(|| Error::NoConvergence { iterations: max_iters, residual: f64::NAN })
}

/// Upper bound on `κ_p` with a witness function.
pub fn kappa_p_estimate(g: &FiniteGraph, p: f64, settings: &OptimizerSettings) -> Result<QuotientEstimate> {
    check_p(p)?;
    check_connected(g)?;
    let eval = |f: &[f64]| -> (f64, Vec<f64>) {
        let t = gradient(g, f);
        let num = sum_pow(&t, p);
        let den = sum_pow(f, p);
        let phi: Vec<f64> = t.iter().map(|&x| signed_pow(x, p - 1.0)).collect();
        let div = divergence(g, &phi);
        // d/df of (1/p)(ln Σ|∇f|^p - ln Σ|f|^p); ∂t_e/∂f is +1 at the high end
        let grad = div.iter().zip(f).map(|(&dv, &x)| dv / num - signed_pow(x, p - 1.0) / den).collect();
        ((num.ln() - den.ln()) / p, grad)
    };
    let starts = starting_points(g, settings, Vec::new())?;
    best_of(&starts, eval, |f| kappa_quotient(g, f, p), settings.max_iters)
}

fn resolve_degree(g: &FiniteGraph, ambient_degree: Option<usize>) -> Result<f64> {
    match ambient_degree.or(g.regular_degree()) {
        Some(d) if d > 0 => Ok(d as f64),
        Some(_) => Err(Error::InvalidGraph("degree zero".into())),
        None => Err(Error::NotRegular),
    }
}

/// Spectral data needed for the `λ_p` lower bounds.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaPBounds {
    pub upper: f64,
    pub lower: f64,
    /// `2λ₂/p̄`.
    pub interpolation_bound: f64,
    /// `1 - σ^{2/p̄}` with `σ` the norm of `P` on zero-sum functions, when `σ < 1`.
    pub contraction_bound: Option<f64>,
    #[serde(skip)]
    pub witness: Vec<f64>,
}

/// Upper estimate of `λ_p` (witness) and the lower bounds
/// `max(2λ₂/p̄, 1 - σ^{2/p̄})`.
pub fn lambda_p_estimate(g: &FiniteGraph, p: f64, ambient_degree: Option<usize>, settings: &OptimizerSettings) -> Result<LambdaPBounds> {
    check_p(p)?;
    check_connected(g)?;
    let d = resolve_degree(g, ambient_degree)?;
    let eval = |f: &[f64]| -> (f64, Vec<f64>) {
        let lf = apply_scaled_laplacian(g, d, f);
        let num = sum_pow(&lf, p);
        let den = sum_pow(f, p);
        let psi: Vec<f64> = lf.iter().map(|&x| signed_pow(x, p - 1.0)).collect();
        let back = apply_scaled_laplacian(g, d, &psi);
        let grad = back.iter().zip(f).map(|(&b, &x)| b / num - signed_pow(x, p - 1.0) / den).collect();
        ((num.ln() - den.ln()) / p, grad)
    };
    let n = g.vertex_count();
    let (values, vectors) = if n <= DENSE_LIMIT {
        sorted_eigen(scaled_laplacian(g, d))
    } else {
        let est = lanczos_smallest_nonzero(g, d, 1e-10, 300, settings.seed)?;
        (vec![0.0, est.value], vec![vec![0.0; n], est.vector])
    };
    let lambda2 = values[1];
    let extra = if n <= 16 { Vec::new() } else { vec![vectors[1].clone()] };
    let starts = starting_points(g, settings, extra)?;
    let est = best_of(&starts, eval, |f| lambda_quotient(g, d, f, p), settings.max_iters)?;
    let pb = p_bar(p);
    let interpolation_bound = 2.0 * lambda2 / pb;
    let contraction_bound = if n <= DENSE_LIMIT {
        let sigma = values[1..].iter().fold(0.0f64, |a, &l| a.max((1.0 - l).abs()));
        (sigma < 1.0 - 1e-12).then(|| 1.0 - sigma.powf(2.0 / pb))
    } else {
        None
    };
    let lower = contraction_bound.map_or(interpolation_bound, |c| c.max(interpolation_bound));
    Ok(LambdaPBounds { upper: est.value, lower, interpolation_bound, contraction_bound, witness: est.witness })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn contains(&self, x: f64, slack: f64) -> bool {
        self.lo - slack <= x && x <= self.hi + slack
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GridOracle {
    pub kappa_p: Bracket,
    pub lambda_p: Bracket,
    pub grid_points: usize,
}

/// Orthonormal basis of the zero-sum subspace of `R^n` (Helmert vectors).
fn helmert_basis(n: usize) -> Vec<Vec<f64>> {
    (1..n)
        .map(|k| {
            let kf = k as f64;
            let scale = 1.0 / (kf * (kf + 1.0)).sqrt();
            (0..n)
                .map(|i| match i.cmp(&k) {
                    std::cmp::Ordering::Less => scale,
                    std::cmp::Ordering::Equal => -kf * scale,
                    std::cmp::Ordering::Greater => 0.0,
                })
                .collect()
        })
        .collect()
}

/// Brute-force minima of both quotients over a grid on the zero-sum unit
/// sphere of a graph with at most four vertices, with rigorous brackets from
/// a Lipschitz bound on the sphere.
pub fn grid_oracle(g: &FiniteGraph, p: f64, ambient_degree: Option<usize>, resolution: usize) -> Result<GridOracle> {
    check_p(p)?;
    check_connected(g)?;
    let n = g.vertex_count();
    if n > 4 {
        return Err(Error::TooLarge { vertices: n, threshold: 4 });
    }
    let resolution = resolution.max(8);
    let d = resolve_degree(g, ambient_degree)?;
    let basis = helmert_basis(n);
    let m = basis.len();
    let embed = |x: &[f64]| -> Vec<f64> { (0..n).map(|i| (0..m).map(|k| x[k] * basis[k][i]).sum()).collect() };
    // sample points in coordinates and the covering radius δ (chordal)
    let mut points: Vec<Vec<f64>> = Vec::new();
    let delta = match m {
        1 => {
            points.push(vec![1.0]);
            0.0
        }
        2 => {
            for i in 0..resolution {
                let t = std::f64::consts::TAU * i as f64 / resolution as f64;
                points.push(vec![t.cos(), t.sin()]);
            }
            2.0 * (std::f64::consts::PI / (2.0 * resolution as f64)).sin()
        }
        _ => {
            let (mt, mp) = (resolution, 2 * resolution);
            for i in 0..=mt {
                let th = std::f64::consts::PI * i as f64 / mt as f64;
                for j in 0..mp {
                    let ph = std::f64::consts::TAU * j as f64 / mp as f64;
                    points.push(vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]);
                }
            }
            std::f64::consts::PI / mt as f64
        }
    };
    let c_p = |k: usize| (k as f64).powf((1.0 / p - 0.5).max(0.0));
    let b_min = (n as f64).powf((1.0 / p - 0.5).min(0.0));
    let columns: Vec<Vec<f64>> = basis.clone();
    let grad_mat = DMatrix::from_fn(g.edge_count(), m, |e, k| gradient(g, &columns[k])[e]);
    let lap_mat = DMatrix::from_fn(n, m, |i, k| apply_scaled_laplacian(g, d, &columns[k])[i]);
    let lipschitz = |a_norm: f64, rows: usize| {
        let la = c_p(rows) * a_norm;
        let qmax = la / b_min;
        (la + qmax * c_p(n)) / b_min
    };
    let lip_k = lipschitz(spectral_norm(&grad_mat), g.edge_count());
    let lip_l = lipschitz(spectral_norm(&lap_mat), n);
    let (mut kmin, mut lmin) = (f64::INFINITY, f64::INFINITY);
    for x in &points {
        let f = embed(x);
        kmin = kmin.min(kappa_quotient(g, &f, p));
        lmin = lmin.min(lambda_quotient(g, d, &f, p));
    }
    Ok(GridOracle {
        kappa_p: Bracket { lo: (kmin - lip_k * delta).max(0.0), hi: kmin },
        lambda_p: Bracket { lo: (lmin - lip_l * delta).max(0.0), hi: lmin },
        grid_points: points.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainItem {
    pub item: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    pub slack: f64,
    /// Whether the inputs are bounds in the direction that makes a pass a proof.
    pub certified: bool,
    /// Informational items are reported but never fail the chain.
    pub informational: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub graph: String,
    pub d: usize,
    pub p: f64,
    pub p_bar: f64,
    pub lambda2: f64,
    pub kappa1: f64,
    pub kappa1_exact: bool,
    pub kappa1_witness: Vec<usize>,
    pub kappa_p_upper: f64,
    pub kappa_p_witness: Vec<f64>,
    pub lambda_p_upper: f64,
    pub lambda_p_lower: f64,
    pub lambda_p_witness: Vec<f64>,
    pub chain: Vec<ChainItem>,
}

impl SpectralReport {
    /// All non-informational items pass.
    pub fn chain_passes(&self) -> bool {
        self.chain.iter().all(|c| c.pass || c.informational)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainSettings {
    pub optimizer: OptimizerSettings,
    /// Minimum slack `lhs - rhs` accepted as a pass.
    pub slack_tol: f64,
    /// Relative tolerance for `κ₂² = dλ₂`.
    pub kappa2_rel_tol: f64,
}

impl Default for ChainSettings {
    fn default() -> Self {
        ChainSettings { optimizer: OptimizerSettings::default(), slack_tol: 1e-6, kappa2_rel_tol: 1e-5 }
    }
}

fn geq(item: &str, lhs: f64, rhs: f64, tol: f64, certified: bool, informational: bool) -> ChainItem {
    let slack = lhs - rhs;
    ChainItem { item: item.to_string(), lhs, rhs, pass: slack >= -tol, slack, certified, informational }
}

/// Computes all constants of a regular graph and checks the comparison chain
/// between `λ₂, κ₁, κ_p, λ_p`.
pub fn verify_chain(g: &FiniteGraph, name: &str, p: f64, settings: &ChainSettings) -> Result<SpectralReport> {
    check_p(p)?;
    check_connected(g)?;
    let d = g.regular_degree().ok_or(Error::NotRegular)?;
    let df = d as f64;
    let lambda2 = lambda2_exact(g, None)?;
    let (cheeger, kappa1_exact) = if g.vertex_count() <= EXHAUSTIVE_THRESHOLD {
        (cheeger_exact(g)?, true)
    } else {
        (cheeger_heuristic(g)?, false)
    };
    let kappa1 = cheeger.as_f64();
    let kp = kappa_p_estimate(g, p, &settings.optimizer)?;
    let lp = lambda_p_estimate(g, p, None, &settings.optimizer)?;
    let pb = p_bar(p);
    let tol = settings.slack_tol;
    let mut chain = Vec::new();
    // κ_p is an upper estimate, which is the sound side for this item
    chain.push(geq("1: 2^(p-1) κ₁ ≥ κ_p^p", 2f64.powf(p - 1.0) * kappa1, kp.value.powf(p), tol, kappa1_exact, false));
    if p == 2.0 {
        let lhs = kp.value * kp.value;
        let rhs = df * lambda2;
        let rel = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
        chain.push(ChainItem {
            item: "2: κ₂² = d λ₂".into(),
            lhs,
            rhs,
            pass: rel < settings.kappa2_rel_tol,
            slack: -rel,
            certified: false,
            informational: false,
        });
    }
    chain.push(geq(
        "3: max{2,p} d^((p-1)/p) κ_p ≥ 2^((p-1)/p) κ₁",
        p.max(2.0) * df.powf((p - 1.0) / p) * kp.value,
        2f64.powf((p - 1.0) / p) * kappa1,
        tol,
        false,
        false,
    ));
    chain.push(geq("4: κ_p ≥ (d^(1/p)/2) λ_p", kp.value, df.powf(1.0 / p) / 2.0 * lp.upper, tol, false, false));
    chain.push(geq("4 (table form): κ_p ≥ d^(1/p) λ_p", kp.value, df.powf(1.0 / p) * lp.upper, tol, false, true));
    chain.push(geq("5: p̄ λ_p ≥ 2 λ₂", pb * lp.upper, 2.0 * lambda2, tol, false, false));
    chain.push(geq("6a: 4 d κ₁ ≥ 2 d² λ₂", 4.0 * df * kappa1, 2.0 * df * df * lambda2, 1e-9, kappa1_exact, false));
    chain.push(geq("6b: 2 d² λ₂ ≥ κ₁²", 2.0 * df * df * lambda2, kappa1 * kappa1, 1e-9, kappa1_exact, false));
    chain.push(geq(
        "summary tail: 2^((4p-1)/2p) λ₂^(1/2p) ≥ 2^((2p-1)/p) κ₁^(1/p) / d^(1/p)",
        2f64.powf((4.0 * p - 1.0) / (2.0 * p)) * lambda2.powf(1.0 / (2.0 * p)),
        2f64.powf((2.0 * p - 1.0) / p) * kappa1.powf(1.0 / p) / df.powf(1.0 / p),
        1e-9,
        kappa1_exact,
        true,
    ));
    chain.push(geq("λ_p upper ≥ λ_p lower", lp.upper, lp.lower, tol, false, false));
    Ok(SpectralReport {
        graph: name.to_string(),
        d,
        p,
        p_bar: pb,
        lambda2,
        kappa1,
        kappa1_exact,
        kappa1_witness: cheeger.witness.members(),
        kappa_p_upper: kp.value,
        kappa_p_witness: kp.witness,
        lambda_p_upper: lp.upper,
        lambda_p_lower: lp.lower,
        lambda_p_witness: lp.witness,
        chain,
    })
}

/// `κ_p` of the single edge: `2^{1/p'}`.
pub fn k2_kappa_p(p: f64) -> f64 {
    2f64.powf(1.0 / conjugate(p))
}
