//! The perforated lamplighter boxes `F_{n;j}`: `F_n` with a covering tree of
//! paths removed so that every vertex sits close to the complement while the
//! boundary stays of order `|F_n|/n`. They violate the radial isoperimetric
//! inequality for any fixed `K`, `k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{bfs_distances, boundary_size, Adjacency, FiniteGraph, VertexSubset, UNREACHED};
use crate::isoperimetry::{depth_to_complement, diameter, radial_from_counts, RadialCheck};
use crate::lazy::LamplighterBox;

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionLog {
    pub translates: usize,
    pub tree_edges: usize,
    pub removed: usize,
    /// Longest realized path, in edges.
    pub max_path_edges: usize,
    /// Diameters of the sampled translates' induced graphs.
    pub translate_diameters: Vec<u32>,
    pub complement_connected: bool,
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub n: usize,
    pub j: usize,
    pub host: LamplighterBox,
    /// `F_n` as a subset of the host's vertices (the core).
    pub full: VertexSubset,
    /// `F_{n;j}`.
    pub reduced: VertexSubset,
    pub log: ConstructionLog,
}

/// Translate bookkeeping: translate `(i, f0)` covers positions
/// `I_i = [ij+1, (i+1)j]` with lamps off `I_i` fixed to `f0`.
struct Paving {
    n: usize,
    j: usize,
    blocks: usize,
}

impl Paving {
    fn block_mask(&self, i: usize) -> usize {
        ((1 << self.j) - 1) << (i * self.j)
    }

    fn per_block(&self) -> usize {
        1 << (self.n - self.j)
    }

    fn count(&self) -> usize {
        self.blocks * self.per_block()
    }

    fn id(&self, i: usize, f0: usize) -> usize {
        let lo = f0 & ((1 << (i * self.j)) - 1);
        let hi = f0 >> ((i + 1) * self.j);
        i * self.per_block() + (lo | hi << (i * self.j))
    }

    fn decode(&self, id: usize) -> (usize, usize) {
        let i = id / self.per_block();
        let c = id % self.per_block();
        let lo = c & ((1 << (i * self.j)) - 1);
        let hi = c >> (i * self.j);
        (i, lo | hi << ((i + 1) * self.j))
    }

    /// Neighbouring translates in block `i ± 1`, in increasing id order.
    fn neighbors(&self, i: usize, f0: usize, out: &mut Vec<usize>) {
        out.clear();
        let shift = i * self.j;
        if i > 0 {
            let base = f0 & !self.block_mask(i - 1);
            out.extend((0..1 << self.j).map(|s| self.id(i - 1, base | s << shift)));
        }
        if i + 1 < self.blocks {
            let base = f0 & !self.block_mask(i + 1);
            out.extend((0..1 << self.j).map(|s| self.id(i + 1, base | s << shift)));
        }
    }
}

/// Lamplighter walk recorded as `(mask, position)` states.
struct Walk {
    states: Vec<(usize, usize)>,
}

impl Walk {
    fn start(f: usize, z: usize) -> Self {
        Walk { states: vec![(f, z)] }
    }

    fn cur(&self) -> (usize, usize) {
        *self.states.last().unwrap()
    }

    fn toggle(&mut self) {
        let (f, z) = self.cur();
        self.states.push((f ^ 1 << (z - 1), z));
    }

    fn step(&mut self, dz: isize) {
        let (f, z) = self.cur();
        self.states.push((f, (z as isize + dz) as usize));
    }
}

/// Route from the picked element of `(i, f0)` to that of `(i + 1, f1)`:
/// sweep `I_i` setting the lamps `f1` has there, cross the shared edge, sweep
/// `I_{i+1}` switching its lamps off and walk back to its left end.
fn crossing_path(p: &Paving, i: usize, f0: usize, f1: usize) -> Walk {
    let j = p.j;
    let (a, b) = (i * j + 1, (i + 1) * j);
    let mut w = Walk::start(f0, a);
    let target = f1 & p.block_mask(i);
    for z in a..=b {
        if target >> (z - 1) & 1 == 1 {
            w.toggle();
        }
        if z < b {
            w.step(1);
        }
    }
    w.step(1);
    let lit = w.cur().0 & p.block_mask(i + 1);
    if lit != 0 {
        let last = usize::BITS as usize - lit.leading_zeros() as usize;
        for z in b + 1..=last {
            if w.cur().0 >> (z - 1) & 1 == 1 {
                w.toggle();
            }
            if z < last {
                w.step(1);
            }
        }
        for _ in b + 1..last {
            w.step(-1);
        }
    }
    debug_assert_eq!(w.cur(), (f1, b + 1));
    w
}

/// Route from the picked element of an end translate out of `F_n`
/// (the exit itself is excluded).
fn exit_path(p: &Paving, i: usize, f0: usize) -> Walk {
    let mut w = Walk::start(f0, i * p.j + 1);
    if i != 0 {
        for _ in i * p.j + 1..p.n {
            w.step(1);
        }
    }
    w
}

fn translate_graph(host: &LamplighterBox, p: &Paving, i: usize, f0: usize) -> Result<FiniteGraph> {
    let j = p.j;
    let mut members = Vec::with_capacity(j << j);
    for s in 0..1usize << j {
        for z in i * j + 1..=(i + 1) * j {
            members.push(host.index(f0 | s << (i * j), z));
        }
    }
    members.sort_unstable();
    let mut edges = Vec::new();
    for (a, &v) in members.iter().enumerate() {
        host.for_each_neighbor(v, |u| {
            if let Ok(b) = members.binary_search(&u) {
                if a < b {
                    edges.push((a, b));
                }
            }
        });
    }
    FiniteGraph::from_edges(members.len(), &edges)
}

/// Builds `F_n` and `F_{n;j}` in an implicit lamplighter box.
pub fn counterexample_build(n: usize, j: usize, budget: usize) -> Result<Counterexample> {
    if j < 1 || n % j != 0 {
        return Err(Error::InvalidArgument(format!("j = {j} must divide n = {n}")));
    }
    if n > 30 {
        return Err(Error::TooLarge { vertices: n << n.min(30), threshold: budget });
    }
    let host = LamplighterBox::new(n, budget)?;
    let p = Paving { n, j, blocks: n / j };
    let total = host.vertex_count();
    let full = VertexSubset::from_members(total, 0..host.core_len())?;
    let count = p.count();

    // BFS covering tree of the auxiliary graph, rooted at the complement node
    let root = count;
    let mut parent = vec![usize::MAX; count];
    let mut queue = Vec::with_capacity(count);
    for id in 0..count {
        let (i, _) = p.decode(id);
        if i == 0 || i + 1 == p.blocks {
            parent[id] = root;
            queue.push(id);
        }
    }
    let mut head = 0;
    let mut nb = Vec::new();
    while head < queue.len() {
        let t = queue[head];
        head += 1;
        let (i, f0) = p.decode(t);
        p.neighbors(i, f0, &mut nb);
        for &u in &nb {
            if parent[u] == usize::MAX {
                parent[u] = t;
                queue.push(u);
            }
        }
    }
    if queue.len() != count {
        return Err(Error::Verification(format!("auxiliary graph reached {} of {count} translates", queue.len())));
    }

    let mut removed = VertexSubset::empty(total);
    let mut max_path_edges = 0;
    for (t, &par) in parent.iter().enumerate() {
        let (i, f0) = p.decode(t);
        let walk = if par == root {
            exit_path(&p, i, f0)
        } else {
            let (pi, pf) = p.decode(par);
            if pi < i {
                crossing_path(&p, pi, pf, f0)
            } else {
                crossing_path(&p, i, f0, pf)
            }
        };
        let edges = walk.states.len() - 1 + usize::from(par == root);
        if edges > 8 * j + 1 {
            return Err(Error::Verification(format!("path of {edges} edges exceeds 8j+1")));
        }
        max_path_edges = max_path_edges.max(edges);
        for &(f, z) in &walk.states {
            removed.insert(host.index(f, z));
        }
    }

    let mut reduced = full.clone();
    let mut outside = VertexSubset::empty(total);
    for v in host.core_len()..total {
        outside.insert(v);
    }
    for v in removed.iter() {
        reduced.remove(v);
        outside.insert(v);
    }
    let collar: Vec<usize> = (host.core_len()..total).collect();
    let reach = bfs_distances(&host, &collar, Some(&outside));
    let complement_connected = removed.iter().all(|v| reach[v] != UNREACHED);

    let mut translate_diameters = Vec::new();
    let samples = [(0, 0), (p.blocks - 1, ((1 << n) - 1) & !p.block_mask(p.blocks - 1))];
    for (i, f0) in samples {
        let tg = translate_graph(&host, &p, i, f0)?;
        let d = diameter(&tg, 10_000).ok_or(Error::Disconnected)?;
        translate_diameters.push(d.upper);
    }

    let log = ConstructionLog {
        translates: count,
        tree_edges: count,
        removed: removed.len(),
        max_path_edges,
        translate_diameters,
        complement_connected,
    };
    Ok(Counterexample { n, j, host, full, reduced, log })
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub check: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

fn verdict(check: &str, value: f64, bound: f64, pass: bool) -> Verdict {
    Verdict { check: check.to_string(), value, bound, pass }
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    pub n: usize,
    pub j: usize,
    pub full_size: usize,
    pub full_boundary: usize,
    pub full_inradius: u32,
    pub log: ConstructionLog,
    pub size: usize,
    pub boundary: usize,
    pub inradius: u32,
    /// `2^n (2 + 27 n 2^{-j})`.
    pub boundary_bound: f64,
    /// `n 2^n (1 - 9 · 2^{-j})`.
    pub size_bound: f64,
    pub radial: RadialCheck,
    pub baseline: RadialCheck,
    /// `(5j)^k K / n`.
    pub comparison: f64,
    pub verdicts: Vec<Verdict>,
}

impl CounterexampleReport {
    pub fn passes(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

/// Exact counts for `F_n` and `F_{n;j}`, the construction bounds and the
/// radial ratios at `(K, k)`.
pub fn counterexample_report(c: &Counterexample, k_const: f64, k: f64) -> Result<CounterexampleReport> {
    let (n, j) = (c.n, c.j);
    let states = 1u64 << n;
    let full_boundary = boundary_size(&c.host, &c.full);
    let full_depth = depth_to_complement(&c.host, &c.full);
    let full_inradius = c.full.iter().map(|v| full_depth[v]).max().unwrap() - 1;
    let depth = depth_to_complement(&c.host, &c.reduced);
    let mut inradius = 0;
    for v in c.reduced.iter() {
        if depth[v] == UNREACHED {
            return Err(Error::Verification("vertex of F_{n;j} unreachable from its complement".into()));
        }
        inradius = inradius.max(depth[v] - 1);
    }
    let size = c.reduced.len();
    let boundary = boundary_size(&c.host, &c.reduced);
    let translates_expected = (n / j) as u64 * (states >> j);
    let removed_bound = (8 * j as u64 + 1) * translates_expected;
    let pow_j = 1u64 << j;
    let nn = n as u64;
    let boundary_bound = states as f64 * (2.0 + 27.0 * n as f64 / pow_j as f64);
    let size_bound = (nn * states) as f64 * (1.0 - 9.0 / pow_j as f64);
    let verdicts = vec![
        verdict("translate count = (n/j) 2^(n-j)", c.log.translates as f64, translates_expected as f64, c.log.translates as u64 == translates_expected),
        verdict("removed ≤ (8j+1)(n/j) 2^(n-j)", c.log.removed as f64, removed_bound as f64, c.log.removed as u64 <= removed_bound),
        verdict("path length ≤ 8j+1", c.log.max_path_edges as f64, (8 * j + 1) as f64, c.log.max_path_edges <= 8 * j + 1),
        // |F| 2^j ≥ n 2^n (2^j - 9)
        verdict("|F_{n;j}| ≥ n 2^n (1 - 9·2^-j)", size as f64, size_bound, (size as u128) * pow_j as u128 + 9 * (nn * states) as u128 >= (nn * states) as u128 * pow_j as u128),
        // |∂F| 2^j ≤ 2^n (2^{j+1} + 27 n)
        verdict("|∂F_{n;j}| ≤ 2^n (2 + 27n·2^-j)", boundary as f64, boundary_bound, (boundary as u128) * pow_j as u128 <= states as u128 * (2 * pow_j as u128 + 27 * nn as u128)),
        verdict("inrad(F_{n;j}) ≤ 4j", inradius as f64, (4 * j) as f64, inradius as usize <= 4 * j),
        verdict("translate diameter ≤ 4j", c.log.translate_diameters.iter().copied().max().unwrap_or(0) as f64, (4 * j) as f64, c.log.translate_diameters.iter().all(|&d| d as usize <= 4 * j)),
        verdict("complement connected", f64::from(u8::from(c.log.complement_connected)), 1.0, c.log.complement_connected),
        verdict("|F_n| = n 2^n", c.full.len() as f64, (nn * states) as f64, c.full.len() as u64 == nn * states),
        verdict("|∂F_n| = 2^(n+1)", full_boundary as f64, (2 * states) as f64, full_boundary as u64 == 2 * states),
    ];
    Ok(CounterexampleReport {
        n,
        j,
        full_size: c.full.len(),
        full_boundary,
        full_inradius,
        log: c.log.clone(),
        size,
        boundary,
        inradius,
        boundary_bound,
        size_bound,
        radial: radial_from_counts(size, boundary, inradius, k_const, k)?,
        baseline: radial_from_counts(c.full.len(), full_boundary, full_inradius, k_const, k)?,
        comparison: (5.0 * j as f64).powf(k) * k_const / n as f64,
        verdicts,
    })
}
