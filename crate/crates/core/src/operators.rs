//! Gradient, divergence, walk operator and Laplacians on a [`FiniteGraph`].
//!
//! Vertex functions are slices indexed by vertex; edge functions are slices
//! indexed by edge id and read along the stored `low -> high` orientation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::FiniteGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Laplacian {
    /// `I - P`.
    Walk,
    /// `∇*∇`.
    Divergence,
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

pub fn pairing(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    compensated_sum(a.iter().zip(b).map(|(x, y)| x * y))
}

/// Hölder conjugate; `1 <-> inf`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `max(p, p')`.
pub fn p_bar(p: f64) -> f64 {
    p.max(conjugate(p))
}

pub fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidArgument(format!("exponent p = {p} must be >= 1")));
    }
    Ok(())
}

pub fn lp_norm(values: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lp_norm_unchecked(values, p))
}

pub(crate) fn lp_norm_unchecked(values: &[f64], p: f64) -> f64 {
    let m = values.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if p.is_infinite() || m == 0.0 {
        return m;
    }
    if p == 1.0 {
        return compensated_sum(values.iter().map(|x| x.abs()));
    }
    if p == 2.0 {
        return m * compensated_sum(values.iter().map(|x| (x / m) * (x / m))).sqrt();
    }
    m * compensated_sum(values.iter().map(|x| (x.abs() / m).powf(p))).powf(1.0 / p)
}

/// `t_e = f(high) - f(low)`.
pub fn gradient(g: &FiniteGraph, f: &[f64]) -> Vec<f64> {
    assert_eq!(f.len(), g.vertex_count(), "vertex function has wrong length");
    g.edges().iter().map(|&(a, b)| f[b] - f[a]).collect()
}

/// `(∇*t)(x) = Σ_{y ~ x} t(y, x)`.
pub fn divergence(g: &FiniteGraph, t: &[f64]) -> Vec<f64> {
    assert_eq!(t.len(), g.edge_count(), "edge function has wrong length");
    let mut out = vec![0.0; g.vertex_count()];
    for (x, slot) in out.iter_mut().enumerate() {
        *slot = compensated_sum(g.incident(x).map(|(y, e)| if x < y { -t[e] } else { t[e] }));
    }
    out
}

/// Symmetric edge values `φ(x) + φ(y)`.
pub fn plus_gradient(g: &FiniteGraph, phi: &[f64]) -> Vec<f64> {
    assert_eq!(phi.len(), g.vertex_count(), "vertex function has wrong length");
    g.edges().iter().map(|&(a, b)| phi[a] + phi[b]).collect()
}

/// `(Pf)(x)` = mean of `f` over `N(x)`; isolated vertices map to 0.
pub fn walk_apply(g: &FiniteGraph, f: &[f64]) -> Vec<f64> {
    assert_eq!(f.len(), g.vertex_count(), "vertex function has wrong length");
    (0..g.vertex_count())
        .map(|x| {
            let nb = g.neighbors(x);
            if nb.is_empty() {
                0.0
            } else {
                compensated_sum(nb.iter().map(|&y| f[y])) / nb.len() as f64
            }
        })
        .collect()
}

/// Pushes a distribution one step: `μ ↦ μP`, i.e. mass at `x` is split
/// equally among its neighbours.
pub fn walk_push(g: &FiniteGraph, mu: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; g.vertex_count()];
    for x in 0..g.vertex_count() {
        let nb = g.neighbors(x);
        if mu[x] != 0.0 && !nb.is_empty() {
            let share = mu[x] / nb.len() as f64;
            for &y in nb {
                out[y] += share;
            }
        }
    }
    out
}

pub fn laplacian_apply(g: &FiniteGraph, f: &[f64], convention: Laplacian) -> Result<Vec<f64>> {
    match convention {
        Laplacian::Walk => {
            if let Some(v) = (0..g.vertex_count()).find(|&v| g.degree(v) == 0) {
                return Err(Error::InvalidGraph(format!("walk Laplacian undefined at isolated vertex {v}")));
            }
            Ok(f.iter().zip(walk_apply(g, f)).map(|(a, b)| a - b).collect())
        }
        Laplacian::Divergence => Ok(divergence_laplacian(g, f)),
    }
}

/// `∇*∇f(x) = Σ_{y ~ x} (f(x) - f(y))`, computed without forming `∇f`.
pub fn divergence_laplacian(g: &FiniteGraph, f: &[f64]) -> Vec<f64> {
    (0..g.vertex_count())
        .map(|x| compensated_sum(g.neighbors(x).iter().map(|&y| f[x] - f[y])))
        .collect()
}

/// Subtracts the mean.
pub fn project_zero_sum(f: &mut [f64]) {
    let mean = compensated_sum(f.iter().copied()) / f.len() as f64;
    for x in f.iter_mut() {
        *x -= mean;
    }
}

/// `index,value` lines.
pub fn to_csv(values: &[f64]) -> String {
    let mut s = String::from("index,value\n");
    for (i, v) in values.iter().enumerate() {
        s.push_str(&format!("{i},{v:e}\n"));
    }
    s
}
