//! Conjugate gradient and Lanczos on graph Laplacians, plus dense helpers.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::FiniteGraph;
use crate::operators::{compensated_sum, project_zero_sum};

#[derive(Clone, Debug)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// True relative residual `‖Ax - b‖₂ / ‖b‖₂`, recomputed at exit.
    pub residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    compensated_sum(a.iter().zip(b).map(|(x, y)| x * y))
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Combinatorial Laplacian `(D - A) x` into `out`.
pub fn laplacian_into(g: &FiniteGraph, x: &[f64], out: &mut [f64]) {
    for v in 0..g.vertex_count() {
        let nb = g.neighbors(v);
        let mut s = nb.len() as f64 * x[v];
        for &u in nb {
            s -= x[u];
        }
        out[v] = s;
    }
}

/// CG for `A x = b` restricted to zero-sum vectors, where `A` is symmetric
/// positive semidefinite with kernel spanned by the constants.
pub fn cg_zero_sum<F>(apply: F, b: &[f64], tol: f64, max_iter: usize) -> CgOutcome
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let mut rhs = b.to_vec();
    project_zero_sum(&mut rhs);
    let bnorm = norm2(&rhs);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return CgOutcome { x, iterations: 0, residual: 0.0, converged: true };
    }
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let mut iterations = 0;
    while iterations < max_iter && rr.sqrt() > tol * bnorm {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        iterations += 1;
        if iterations % 50 == 0 {
            // refresh the recursive residual against drift
            project_zero_sum(&mut x);
            apply(&x, &mut ap);
            for i in 0..n {
                r[i] = rhs[i] - ap[i];
            }
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    project_zero_sum(&mut x);
    apply(&x, &mut ap);
    let res: Vec<f64> = rhs.iter().zip(&ap).map(|(b, a)| b - a).collect();
    let residual = norm2(&res) / bnorm;
    CgOutcome { x, iterations, residual, converged: residual <= tol.max(1e-14) * 10.0 }
}

#[derive(Clone, Debug)]
pub struct EigenEstimate {
    /// Rayleigh quotient of the returned vector.
    pub value: f64,
    pub vector: Vec<f64>,
    /// `‖Mx - value·x‖₂` for the unit vector `x`; some eigenvalue of `M`
    /// lies within this distance of `value`.
    pub residual: f64,
    pub steps: usize,
}

/// Smallest nonzero eigenvalue of `(D - A) / scale` on a connected graph by
/// shift-invert Lanczos (inner CG solves) with full reorthogonalization.
pub fn lanczos_smallest_nonzero(g: &FiniteGraph, scale: f64, tol: f64, max_steps: usize, seed: u64) -> Result<EigenEstimate> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two vertices".into()));
    }
    let apply = |x: &[f64], out: &mut [f64]| laplacian_into(g, x, out);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    project_zero_sum(&mut v);
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut best: Option<EigenEstimate> = None;
    let mut lv = vec![0.0; n];
    for step in 0..max_steps.min(n - 1) {
        let cur = basis.last().unwrap().clone();
        let solve = cg_zero_sum(apply, &cur, 1e-13, 50 * n + 1000);
        let mut w = solve.x;
        let alpha = dot(&w, &cur);
        alphas.push(alpha);
        for _pass in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                for i in 0..n {
                    w[i] -= c * q[i];
                }
            }
        }
        project_zero_sum(&mut w);
        let beta = norm2(&w);
        let k = alphas.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alphas[i];
            if i + 1 < k {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (imax, _) = eig.eigenvalues.iter().enumerate().fold((0, f64::MIN), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
        let s = eig.eigenvectors.column(imax);
        let mut y = vec![0.0; n];
        for (j, q) in basis.iter().enumerate() {
            for i in 0..n {
                y[i] += s[j] * q[i];
            }
        }
        project_zero_sum(&mut y);
        let ny = norm2(&y);
        y.iter_mut().for_each(|x| *x /= ny);
        apply(&y, &mut lv);
        let mu = dot(&y, &lv);
        let res: Vec<f64> = lv.iter().zip(&y).map(|(a, b)| a - mu * b).collect();
        let est = EigenEstimate { value: mu / scale, vector: y, residual: norm2(&res) / scale, steps: step + 1 };
        let done = est.residual <= tol * est.value.max(1e-300) || beta < 1e-14;
        if best.as_ref().is_none_or(|b| est.residual < b.residual) {
            best = Some(est);
        }
        if done {
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|x| x / beta).collect());
    }
    best.ok_or_else(|| Error::NoConvergence { iterations: 0, residual: f64::INFINITY })
}

/// Dense symmetric eigendecomposition, eigenvalues ascending with matching
/// unit eigenvectors.
pub fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order.iter().map(|&i| eig.eigenvectors.column(i).iter().copied().collect()).collect();
    (values, vectors)
}

/// Largest singular value of a dense matrix.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.singular_values().iter().fold(0.0f64, |a, &x| a.max(x))
}
