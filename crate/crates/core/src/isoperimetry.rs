//! Isoperimetric profiles, set geometry (inradius, diameter, mean depth) and
//! the radial isoperimetric check.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{bfs_distances, boundary_size, induced_subgraph, Adjacency, FiniteGraph, VertexSubset, UNREACHED};
use crate::lazy::{materialize_ball, LazyGraph};
use crate::spectral::{cheeger_exact, cheeger_heuristic};
use crate::subsets::{for_each_connected_subset, for_each_subset, mask_lex_less, EXHAUSTIVE_THRESHOLD};

/// Largest size handled by connected-subset sampling on big graphs.
pub const SAMPLED_MAX_SIZE: usize = 8;

#[derive(Clone, Debug)]
pub struct IsoProfile {
    pub sizes: Vec<usize>,
    /// `𝔉(x)`, smallest boundary among sets of size `x` found.
    pub boundary: Vec<usize>,
    pub witnesses: Vec<VertexSubset>,
    /// Whether the entry is a true minimum (exhaustive) or only an upper bound.
    pub exact: Vec<bool>,
}

impl IsoProfile {
    /// `𝔊(x) = 𝔉(x)/x`.
    pub fn ratio(&self, i: usize) -> Ratio<u64> {
        Ratio::new(self.boundary[i] as u64, self.sizes[i] as u64)
    }

    /// Running minimum `𝔊↓`.
    pub fn ratio_down(&self) -> Vec<Ratio<u64>> {
        let mut out: Vec<Ratio<u64>> = Vec::with_capacity(self.sizes.len());
        for i in 0..self.sizes.len() {
            let r = self.ratio(i);
            out.push(match out.last() {
                Some(&prev) if prev < r => prev,
                _ => r,
            });
        }
        out
    }

    /// `J(x) = 1/𝔊(x)`.
    pub fn j(&self, i: usize) -> f64 {
        1.0 / ratio_f64(self.ratio(i))
    }

    /// `J↗(x) = 1/𝔊↓(x)`.
    pub fn j_up(&self) -> Vec<f64> {
        self.ratio_down().into_iter().map(|r| 1.0 / ratio_f64(r)).collect()
    }

    /// `𝔉↗(x) = x 𝔊↓(x)`.
    pub fn boundary_up(&self) -> Vec<f64> {
        self.ratio_down().iter().zip(&self.sizes).map(|(r, &x)| ratio_f64(*r) * x as f64).collect()
    }

    fn index_of(&self, x: usize) -> Option<usize> {
        self.sizes.iter().position(|&s| s == x)
    }

    /// `x,F,G,Gdown,exact` rows.
    pub fn to_csv(&self) -> String {
        let down = self.ratio_down();
        let mut s = String::from("x,F,G,Gdown,exact\n");
        for i in 0..self.sizes.len() {
            s.push_str(&format!("{},{},{},{},{}\n", self.sizes[i], self.boundary[i], ratio_f64(self.ratio(i)), ratio_f64(down[i]), self.exact[i]));
        }
        s
    }
}

pub fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Exact profile by enumerating all subsets (at most
/// [`EXHAUSTIVE_THRESHOLD`] vertices), or, on larger graphs with
/// `max_size ≤ 8`, the best connected set of each size (flagged non-exact).
pub fn profile_exact(g: &FiniteGraph, max_size: usize) -> Result<IsoProfile> {
    let n = g.vertex_count();
    let top = max_size.min(n / 2);
    if top == 0 {
        return Err(Error::InvalidArgument("profile needs at least one size x with 1 ≤ x ≤ |V|/2".into()));
    }
    if n <= EXHAUSTIVE_THRESHOLD {
        let mut best: Vec<Option<(usize, u64)>> = vec![None; top + 1];
        for_each_subset(g, EXHAUSTIVE_THRESHOLD, |mask, size, b| {
            if size > top {
                return;
            }
            let better = match best[size] {
                None => true,
                Some((bb, bm)) => b < bb || (b == bb && mask_lex_less(mask, bm)),
            };
            if better {
                best[size] = Some((b, mask));
            }
        })?;
        let sizes: Vec<usize> = (1..=top).collect();
        let boundary = sizes.iter().map(|&x| best[x].unwrap().0).collect();
        let witnesses = sizes.iter().map(|&x| VertexSubset::from_mask(n, best[x].unwrap().1)).collect();
        return Ok(IsoProfile { exact: vec![true; top], sizes, boundary, witnesses });
    }
    if top > SAMPLED_MAX_SIZE {
        return Err(Error::TooLarge { vertices: n, threshold: EXHAUSTIVE_THRESHOLD });
    }
    let mut best: Vec<Option<(usize, Vec<usize>)>> = vec![None; top + 1];
    let mut member = VertexSubset::empty(n);
    for_each_connected_subset(g, top, |s| {
        for &v in s {
            member.insert(v);
        }
        let b = boundary_size(g, &member);
        for &v in s {
            member.remove(v);
        }
        let k = s.len();
        let better = match &best[k] {
            None => true,
            Some((bb, bs)) => b < *bb || (b == *bb && s < &bs[..]),
        };
        if better {
            best[k] = Some((b, s.to_vec()));
        }
    });
    let sizes: Vec<usize> = (1..=top).filter(|&x| best[x].is_some()).collect();
    let boundary = sizes.iter().map(|&x| best[x].as_ref().unwrap().0).collect();
    let witnesses = sizes
        .iter()
        .map(|&x| VertexSubset::from_members(n, best[x].as_ref().unwrap().1.iter().copied()))
        .collect::<Result<Vec<_>>>()?;
    Ok(IsoProfile { exact: vec![false; sizes.len()], sizes, boundary, witnesses })
}

#[derive(Clone, Debug)]
pub struct OptimalSet {
    pub size: usize,
    pub witness: VertexSubset,
    /// For an optimal size `a` with `2a` covered: whether some optimal size
    /// lies in `(a, 2a]`.
    pub next_within_double: Option<bool>,
}

/// Sizes whose witness attains `𝔊↓`, i.e. `𝔊(x) ≤ 𝔊(y)` for all `y ≤ x`.
pub fn optimal_sets(profile: &IsoProfile) -> Vec<OptimalSet> {
    let down = profile.ratio_down();
    let optimal: Vec<bool> = (0..profile.sizes.len()).map(|i| profile.ratio(i) == down[i]).collect();
    let mut out = Vec::new();
    for i in 0..profile.sizes.len() {
        if !optimal[i] {
            continue;
        }
        let a = profile.sizes[i];
        let next_within_double = profile.index_of(2 * a).map(|_| {
            (i + 1..profile.sizes.len()).any(|k| profile.sizes[k] <= 2 * a && optimal[k])
        });
        out.push(OptimalSet { size: a, witness: profile.witnesses[i].clone(), next_within_double });
    }
    out
}

/// `𝔉(a + b) ≤ 𝔉(a) + 𝔉(b)` on all exact triples; returns violations.
pub fn subadditivity_violations(profile: &IsoProfile) -> Vec<(usize, usize)> {
    let mut bad = Vec::new();
    for i in 0..profile.sizes.len() {
        for k in i..profile.sizes.len() {
            let (a, b) = (profile.sizes[i], profile.sizes[k]);
            if let Some(s) = profile.index_of(a + b) {
                if profile.exact[i] && profile.exact[k] && profile.exact[s] && profile.boundary[s] > profile.boundary[i] + profile.boundary[k] {
                    bad.push((a, b));
                }
            }
        }
    }
    bad
}

/// Distance from each vertex of `set` to the complement (`UNREACHED`
/// elsewhere). Every vertex of `set` must have its full neighbourhood in `g`.
pub fn depth_to_complement<G: Adjacency>(g: &G, set: &VertexSubset) -> Vec<u32> {
    let mut sources = Vec::new();
    for v in set.iter() {
        g.for_each_neighbor(v, |u| {
            if !set.contains(u) {
                sources.push(u);
            }
        });
    }
    sources.sort_unstable();
    sources.dedup();
    bfs_distances(g, &sources, Some(set))
}

/// `(inradius, mean distance to ∂F)`: the largest `r` with some `B_x(r) ⊂ F`
/// and the average over `x ∈ F` of `d(x, F^c) - 1`. `None` inradius when `F`
/// has no outside neighbour.
pub fn inradius_and_depth<G: Adjacency>(g: &G, set: &VertexSubset) -> (Option<u32>, f64) {
    let dist = depth_to_complement(g, set);
    let mut max = 0u32;
    let mut total = 0u64;
    for v in set.iter() {
        let d = dist[v];
        if d == UNREACHED {
            return (None, f64::INFINITY);
        }
        max = max.max(d);
        total += u64::from(d - 1);
    }
    (Some(max - 1), total as f64 / set.len() as f64)
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct DiameterBounds {
    pub lower: u32,
    pub upper: u32,
}

impl DiameterBounds {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Diameter of a connected graph: exact up to `exact_limit` vertices,
/// otherwise double sweep (lower) and twice an eccentricity (upper).
pub fn diameter(g: &FiniteGraph, exact_limit: usize) -> Option<DiameterBounds> {
    let n = g.vertex_count();
    let ecc = |s: usize| -> Option<(u32, usize)> {
        let d = bfs_distances(g, &[s], None);
        let mut best = (0u32, s);
        for (v, &x) in d.iter().enumerate() {
            if x == UNREACHED {
                return None;
            }
            if x > best.0 {
                best = (x, v);
            }
        }
        Some(best)
    };
    if n <= exact_limit {
        let mut diam = 0;
        for s in 0..n {
            diam = diam.max(ecc(s)?.0);
        }
        return Some(DiameterBounds { lower: diam, upper: diam });
    }
    let (e0, far) = ecc(0)?;
    let (e1, _) = ecc(far)?;
    Some(DiameterBounds { lower: e0.max(e1), upper: (2 * e0).min(2 * e1) })
}

#[derive(Clone, Debug, Serialize)]
pub struct GeometryReport {
    pub size: usize,
    pub boundary: usize,
    pub inradius: u32,
    pub avg_boundary_distance: f64,
    pub connected: bool,
    /// Diameter of the induced graph; `None` when it is disconnected.
    pub diameter: Option<DiameterBounds>,
    pub max_induced_degree: usize,
}

/// Geometry of `set ⊆ core` of a window graph.
pub fn geometry(host: &FiniteGraph, core: &VertexSubset, set: &VertexSubset) -> Result<GeometryReport> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("geometry of an empty set".into()));
    }
    if !set.is_subset_of(core) {
        return Err(Error::NotInterior("set leaves the window core; materialize a larger window".into()));
    }
    let (inrad, rbar) = inradius_and_depth(host, set);
    let inradius = inrad.ok_or_else(|| Error::NotInterior("set has no outside neighbour in the window".into()))?;
    let (induced, _) = induced_subgraph(host, set)?;
    let connected = induced.is_connected();
    Ok(GeometryReport {
        size: set.len(),
        boundary: boundary_size(host, set),
        inradius,
        avg_boundary_distance: rbar,
        connected,
        diameter: if connected { diameter(&induced, 10_000) } else { None },
        max_induced_degree: induced.max_degree(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeGrowth {
    /// `f_v(r)`: smallest ball size over the sampled centers.
    pub min: Vec<usize>,
    /// `f_V(r)`: largest ball size over the sampled centers.
    pub max: Vec<usize>,
    /// True when one center suffices (vertex-transitive family).
    pub transitive: bool,
    pub centers: usize,
}

impl VolumeGrowth {
    /// `min{r : f_V(r)·den ≥ num}`.
    pub fn max_inverse_ceil(&self, num: u64, den: u64) -> Option<usize> {
        self.max.iter().position(|&v| v as u64 * den >= num)
    }

    /// `max{r : f_v(r) ≤ y}` within the table (`None` when `f_v(0) > y`).
    pub fn min_inverse_floor(&self, y: u64) -> Option<usize> {
        self.min.iter().rposition(|&v| v as u64 <= y)
    }

    /// Whether the table reaches `y`, so the floor inverse is not truncated.
    pub fn min_covers(&self, y: u64) -> bool {
        self.min.last().is_some_and(|&v| v as u64 > y)
    }
}

/// Ball sizes `|B_r(x)|` for `r ≤ rmax`, minimized and maximized over the
/// given centers.
pub fn volume_growth<G: LazyGraph>(g: &G, centers: &[G::Label], rmax: usize, budget: usize) -> Result<VolumeGrowth> {
    if centers.is_empty() {
        return Err(Error::InvalidArgument("volume growth needs at least one center".into()));
    }
    let mut min = vec![usize::MAX; rmax + 1];
    let mut max = vec![0usize; rmax + 1];
    for c in centers {
        let w = materialize_ball(g, c, rmax, budget)?;
        let mut acc = 0;
        for (r, s) in w.layers.iter().enumerate() {
            acc += s;
            min[r] = min[r].min(acc);
            max[r] = max[r].max(acc);
        }
    }
    Ok(VolumeGrowth { min, max, transitive: g.is_vertex_transitive(), centers: centers.len() })
}

/// Ball sizes of a finite graph over all centers.
pub fn volume_growth_finite(g: &FiniteGraph, rmax: usize) -> VolumeGrowth {
    let n = g.vertex_count();
    let mut min = vec![usize::MAX; rmax + 1];
    let mut max = vec![0usize; rmax + 1];
    for s in 0..n {
        let d = bfs_distances(g, &[s], None);
        let mut counts = vec![0usize; rmax + 1];
        for &x in &d {
            if (x as usize) <= rmax {
                counts[x as usize] += 1;
            }
        }
        let mut acc = 0;
        for r in 0..=rmax {
            acc += counts[r];
            min[r] = min[r].min(acc);
            max[r] = max[r].max(acc);
        }
    }
    VolumeGrowth { min, max, transitive: false, centers: n }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub bound: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

fn check(bound: &str, lhs: f64, rhs: f64, pass: bool) -> BoundCheck {
    BoundCheck { bound: bound.to_string(), lhs, rhs, pass }
}

/// Evaluates the geometric lemmas whose inputs are available:
/// volume bounds on diameter and inradius, the covering bound
/// `f_V(inrad)·|∂F| ≥ |F|`, the Cheeger diameter bound (needs
/// `induced` and `|F| ≥` diameter 3), and `r̄(F) ≤ inrad(F)`.
pub fn geometry_bound_checks(report: &GeometryReport, volume: Option<&VolumeGrowth>, induced: Option<&FiniteGraph>) -> Result<Vec<BoundCheck>> {
    let mut out = Vec::new();
    let size = report.size as u64;
    out.push(check("mean depth r̄(F) ≤ inrad(F)", report.avg_boundary_distance, report.inradius as f64, report.avg_boundary_distance <= report.inradius as f64 + 1e-12));
    if let Some(vol) = volume {
        if report.connected {
            if let (Some(diam), Some(inv)) = (report.diameter, vol.max_inverse_ceil(size, 1)) {
                out.push(check("δ(F) ≥ f_V⁻¹(|F|)", diam.upper as f64, inv as f64, diam.lower as usize >= inv || diam.upper as usize >= inv && diam.is_exact()));
            }
            if vol.min_covers(size) {
                if let Some(inv) = vol.min_inverse_floor(size) {
                    out.push(check("inrad(F) ≤ f_v⁻¹(|F|)", report.inradius as f64, inv as f64, report.inradius as usize <= inv));
                }
            }
        }
        if report.boundary > 0 {
            if let Some(inv) = vol.max_inverse_ceil(size, report.boundary as u64) {
                out.push(check("inrad(F) ≥ f_V⁻¹(|F|/|∂F|)", report.inradius as f64, inv as f64, report.inradius as usize >= inv));
            }
        }
    }
    if let (Some(g), Some(diam)) = (induced, report.diameter) {
        if diam.lower >= 3 {
            let kappa = if g.vertex_count() <= EXHAUSTIVE_THRESHOLD { cheeger_exact(g)? } else { cheeger_heuristic(g)? };
            let k = g.max_degree() as f64;
            // an upper estimate of κ₁ only lowers the right-hand side
            let rhs = 3.0 * k * (report.size as f64).ln() / (kappa.as_f64() * 2f64.ln());
            out.push(check("δ(F) ≤ 3k log|F| / (κ₁(F) log 2)", diam.upper as f64, rhs, (diam.upper as f64) <= rhs));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct RadialCheck {
    #[serde(rename = "K")]
    pub k_const: f64,
    pub k: f64,
    pub size: usize,
    pub boundary: usize,
    pub inradius: u32,
    /// `K |∂A| (1 + inrad A)^k / |A|`.
    pub ratio: f64,
    pub passes: bool,
}

impl RadialCheck {
    /// Lower bound on the inradius implied when the inequality holds:
    /// `(K 𝔊)^{-1/k} - 1`, with `𝔊 = |∂A|/|A|`.
    pub fn implied_inradius_bound(&self) -> f64 {
        (self.k_const * self.boundary as f64 / self.size as f64).powf(-1.0 / self.k) - 1.0
    }
}

pub fn radial_from_counts(size: usize, boundary: usize, inradius: u32, k_const: f64, k: f64) -> Result<RadialCheck> {
    if k_const < 1.0 || k < 1.0 {
        return Err(Error::InvalidArgument("radial constants need K ≥ 1 and k ≥ 1".into()));
    }
    let ratio = k_const * boundary as f64 * (1.0 + inradius as f64).powf(k) / size as f64;
    Ok(RadialCheck { k_const, k, size, boundary, inradius, ratio, passes: ratio >= 1.0 })
}

/// `K |∂A| (1 + inrad A)^k ≥ |A|` for a set whose neighbourhood is present
/// in `g`.
pub fn radial_check<G: Adjacency>(g: &G, set: &VertexSubset, k_const: f64, k: f64) -> Result<RadialCheck> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("radial check of an empty set".into()));
    }
    let (inrad, _) = inradius_and_depth(g, set);
    let inradius = inrad.ok_or_else(|| Error::NotInterior("set has no outside neighbour".into()))?;
    radial_from_counts(set.len(), boundary_size(g, set), inradius, k_const, k)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub enum ProfileClass {
    /// `𝔊 ≥ K`.
    Strong { k: f64 },
    /// `𝔊 ≥ K / x^{1/d}`.
    Polynomial { d: f64 },
    /// `𝔊 ≥ K / (1 + ln x)^{1/ν}`.
    LogPower { nu: f64 },
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub class: ProfileClass,
    pub rss_strong: f64,
    pub rss_polynomial: f64,
    pub rss_log_power: f64,
}

/// Least squares `y = a + b t`; returns `(a, b, rss)`.
fn linear_fit(t: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = t.len() as f64;
    let mt = t.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let stt: f64 = t.iter().map(|x| (x - mt) * (x - mt)).sum();
    let sty: f64 = t.iter().zip(y).map(|(a, b)| (a - mt) * (b - my)).sum();
    let b = if stt > 0.0 { sty / stt } else { 0.0 };
    let a = my - b * mt;
    let rss = t.iter().zip(y).map(|(x, v)| (v - a - b * x).powi(2)).sum();
    (a, b, rss)
}

/// Picks the model among constant, power and log-power decay of `𝔊↓` that
/// fits `log 𝔊↓` best. The constant model wins when its residual is within
/// 5% of the others; otherwise the winner must beat the runner-up by a
/// factor 4.
pub fn classify_profile(samples: &[(f64, f64)]) -> Result<Classification> {
    if samples.len() < 5 {
        return Err(Error::InvalidArgument(format!("need at least 5 samples, got {}", samples.len())));
    }
    if samples.iter().any(|&(x, g)| !(x >= 1.0) || !(g > 0.0)) {
        return Err(Error::InvalidArgument("samples need x ≥ 1 and 𝔊 > 0".into()));
    }
    let xmin = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let xmax = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    if xmax < 100.0 * xmin {
        return Err(Error::InvalidArgument("samples must span at least two decades of x".into()));
    }
    let y: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let (a0, _, rss_strong) = linear_fit(&vec![0.0; y.len()], &y);
    let (_, bp, rss_polynomial) = linear_fit(&samples.iter().map(|s| s.0.ln()).collect::<Vec<_>>(), &y);
    let (_, bl, rss_log_power) = linear_fit(&samples.iter().map(|s| (1.0 + s.0.ln()).ln()).collect::<Vec<_>>(), &y);
    let floor = 1e-12 * y.len() as f64;
    let best_other = rss_polynomial.min(rss_log_power);
    let class = if rss_strong <= 1.05 * best_other + floor {
        ProfileClass::Strong { k: a0.exp() }
    } else if rss_polynomial * 4.0 <= rss_log_power && bp < 0.0 {
        ProfileClass::Polynomial { d: -1.0 / bp }
    } else if rss_log_power * 4.0 <= rss_polynomial && bl < 0.0 {
        ProfileClass::LogPower { nu: -1.0 / bl }
    } else {
        ProfileClass::Inconclusive
    };
    Ok(Classification { class, rss_strong, rss_polynomial, rss_log_power })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_family, tree_ray_graph, Family};
    use crate::lazy::{lamplighter_window, materialize_set, LampLabel, Lamplighter, Lattice};

    fn fam(f: Family) -> FiniteGraph {
        generate_family(&f).unwrap()
    }

    #[test]
    fn cycle_profile() {
        let p = profile_exact(&fam(Family::Cycle(8)), 8).unwrap();
        assert_eq!(p.sizes, vec![1, 2, 3, 4]);
        for i in 0..4 {
            assert_eq!(p.ratio(i), Ratio::new(2, p.sizes[i] as u64));
        }
        let opt = optimal_sets(&p);
        assert!(opt.iter().any(|o| o.size == 4 && o.witness.members() == vec![0, 1, 2, 3]));
    }

    #[test]
    fn complete_profile() {
        let p = profile_exact(&fam(Family::Complete(4)), 4).unwrap();
        assert_eq!(p.ratio(0), Ratio::new(3, 1));
        assert_eq!(p.ratio(1), Ratio::new(2, 1));
        let sizes: Vec<usize> = optimal_sets(&p).iter().map(|o| o.size).collect();
        assert_eq!(sizes, vec![1, 2]);
    }

    #[test]
    fn tree_ray_truncation_profile() {
        let tr = tree_ray_graph(3, 0).unwrap();
        let p = profile_exact(&tr.graph, 7).unwrap();
        let opt = optimal_sets(&p);
        for m in 1..=3 {
            let x = (1 << m) - 1;
            let i = p.sizes.iter().position(|&s| s == x).unwrap();
            assert_eq!(p.ratio(i), Ratio::new(1, x as u64));
            assert!(opt.iter().any(|o| o.size == x));
            assert_eq!(boundary_size(&tr.graph, &tr.subtrees[m - 1]), 1);
        }
    }

    #[test]
    fn sampled_profile_is_flagged() {
        let w = lamplighter_window(5, 1 << 20).unwrap();
        let p = profile_exact(&w.graph, 4).unwrap();
        assert!(p.exact.iter().all(|e| !e));
        assert_eq!(p.sizes, vec![1, 2, 3, 4]);
        assert!(profile_exact(&w.graph, 12).is_err());
    }

    #[test]
    fn interval_geometry() {
        let g = fam(Family::Path(21));
        let core = VertexSubset::from_members(21, 1..20).unwrap();
        let set = VertexSubset::from_members(21, 6..=14).unwrap();
        let r = geometry(&g, &core, &set).unwrap();
        assert_eq!(r.inradius, 4);
        assert_eq!(r.diameter, Some(DiameterBounds { lower: 8, upper: 8 }));
        assert!(r.avg_boundary_distance <= 4.0);
        assert!(geometry(&g, &core, &VertexSubset::from_members(21, [0]).unwrap()).is_err());
    }

    #[test]
    fn ball_inradius_is_radius() {
        for r in 0..4 {
            let w = materialize_ball(&Lamplighter, &LampLabel::identity(), r, 10_000).unwrap();
            let rep = geometry(&w.graph, &w.core, &w.core).unwrap();
            assert_eq!(rep.inradius as usize, r);
            let checks = geometry_bound_checks(&rep, None, None).unwrap();
            assert!(checks.iter().all(|c| c.pass));
        }
    }

    #[test]
    fn lamplighter_geometry_bounds() {
        let w = lamplighter_window(3, 1 << 20).unwrap();
        let rep = geometry(&w.graph, &w.core, &w.core).unwrap();
        assert_eq!(rep.inradius, 1);
        let vol = volume_growth(&Lamplighter, &[LampLabel::identity()], 8, 1_000_000).unwrap();
        assert_eq!(&vol.max[..3], &[1, 4, 10]);
        let (induced, _) = induced_subgraph(&w.graph, &w.core).unwrap();
        let checks = geometry_bound_checks(&rep, Some(&vol), Some(&induced)).unwrap();
        assert_eq!(checks.len(), 5);
        assert!(checks.iter().all(|c| c.pass), "{checks:#?}");
    }

    #[test]
    fn radial_examples() {
        let w = materialize_ball(&Lamplighter, &LampLabel::identity(), 0, 100).unwrap();
        assert!(radial_check(&w.graph, &w.core, 1.0, 1.0).unwrap().passes);
        let side = 10i64;
        let core: Vec<Vec<i64>> = (0..side).flat_map(|x| (0..side).map(move |y| vec![x, y])).collect();
        let b = materialize_set(&Lattice(2), &core, 1, 100_000).unwrap();
        let rc = radial_check(&b.graph, &b.core, 1.0, 2.0).unwrap();
        assert_eq!((rc.boundary, rc.inradius), (40, 4));
        assert!(rc.passes);
        assert!(radial_from_counts(1, 1, 0, 0.5, 1.0).is_err());
    }

    #[test]
    fn classify_synthetic() {
        let xs: Vec<f64> = (0..12).map(|i| 10f64.powf(i as f64 / 3.0)).collect();
        let poly: Vec<(f64, f64)> = xs.iter().map(|&x| (x, 3.0 / x.sqrt())).collect();
        match classify_profile(&poly).unwrap().class {
            ProfileClass::Polynomial { d } => assert!((d - 2.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        let flat: Vec<(f64, f64)> = xs.iter().map(|&x| (x, 0.7)).collect();
        assert!(matches!(classify_profile(&flat).unwrap().class, ProfileClass::Strong { .. }));
        let logp: Vec<(f64, f64)> = xs.iter().map(|&x| (x, 1.0 / (1.0 + x.ln()))).collect();
        match classify_profile(&logp).unwrap().class {
            ProfileClass::LogPower { nu } => assert!((nu - 1.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        assert!(classify_profile(&poly[..4]).is_err());
        assert!(classify_profile(&poly[..5]).is_err());
    }

    #[test]
    fn finite_volume_growth_on_cycle() {
        let v = volume_growth_finite(&fam(Family::Cycle(8)), 5);
        assert_eq!(v.max, vec![1, 3, 5, 7, 8, 8]);
        assert_eq!(v.max_inverse_ceil(2, 1), Some(1));
    }
}
