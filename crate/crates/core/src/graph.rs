//! Finite simple graphs, vertex subsets, edge boundaries and the suite families.
//!
//! Every unordered edge `{u, v}` is stored once with `u < v` and gets a stable
//! edge id; antisymmetric edge functions keep one value per edge id, read along
//! the `u -> v` orientation.

use std::collections::VecDeque;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Read-only neighbourhood access shared by materialized and implicit graphs.
pub trait Adjacency {
    fn vertex_count(&self) -> usize;
    fn degree(&self, v: usize) -> usize;
    fn for_each_neighbor<F: FnMut(usize)>(&self, v: usize, f: F);
}

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    /// Edge id of each adjacency entry, parallel to `targets`.
    entry_edge: Vec<usize>,
    edges: Vec<(usize, usize)>,
    regular_degree: Option<usize>,
}

impl fmt::Debug for FiniteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGraph")
            .field("vertices", &self.vertex_count())
            .field("edges", &self.edges.len())
            .field("regular_degree", &self.regular_degree)
            .finish()
    }
}

impl FiniteGraph {
    /// Builds a graph from an unordered edge list. Self-loops and duplicate
    /// edges are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one vertex".into()));
        }
        let mut canon = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) out of range for {n} vertices")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({},{})", w[0].0, w[0].1)));
        }
        Ok(Self::from_sorted_edges(n, canon))
    }

    fn from_sorted_edges(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut deg = vec![0usize; n];
        for &(a, b) in &edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + deg[v];
        }
        let mut fill = offsets.clone();
        let mut pairs = vec![(0usize, 0usize); offsets[n]];
        for (id, &(a, b)) in edges.iter().enumerate() {
            pairs[fill[a]] = (b, id);
            fill[a] += 1;
            pairs[fill[b]] = (a, id);
            fill[b] += 1;
        }
        for v in 0..n {
            pairs[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        let (targets, entry_edge) = pairs.into_iter().unzip();
        let regular_degree = if deg.iter().all(|&d| d == deg[0]) { Some(deg[0]) } else { None };
        FiniteGraph { offsets, targets, entry_edge, edges, regular_degree }
    }

    /// Builds a graph from per-vertex neighbour lists, checking symmetry.
    pub fn from_adjacency(lists: &[Vec<usize>]) -> Result<Self> {
        let n = lists.len();
        let mut edges = Vec::new();
        for (u, list) in lists.iter().enumerate() {
            for &v in list {
                if v >= n {
                    return Err(Error::InvalidGraph(format!("neighbour {v} of {u} out of range")));
                }
                if !lists[v].contains(&u) {
                    return Err(Error::InvalidGraph(format!("asymmetric adjacency: {v} in N({u}) but not {u} in N({v})")));
                }
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        Self::from_edges(n, &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// `(neighbour, edge id)` pairs of `v`.
    pub fn incident(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let r = self.offsets[v]..self.offsets[v + 1];
        self.targets[r.clone()].iter().copied().zip(self.entry_edge[r].iter().copied())
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        let nb = self.neighbors(a);
        nb.binary_search(&b).ok().map(|i| self.entry_edge[self.offsets[a] + i])
    }

    pub fn is_regular(&self) -> bool {
        self.regular_degree.is_some()
    }

    pub fn regular_degree(&self) -> Option<usize> {
        self.regular_degree
    }

    pub fn is_connected(&self) -> bool {
        let dist = bfs_distances(self, &[0], None);
        dist.iter().all(|&d| d != UNREACHED)
    }

    /// Re-checks the structural invariants (symmetry, no loops, no duplicates,
    /// degree table).
    pub fn validate(&self) -> Result<()> {
        for v in 0..self.vertex_count() {
            let nb = self.neighbors(v);
            if nb.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGraph(format!("neighbour list of {v} not strictly sorted")));
            }
            for &u in nb {
                if u == v {
                    return Err(Error::InvalidGraph(format!("self-loop at {v}")));
                }
                if self.neighbors(u).binary_search(&v).is_err() {
                    return Err(Error::InvalidGraph(format!("asymmetric edge {v}->{u}")));
                }
            }
        }
        let sum: usize = (0..self.vertex_count()).map(|v| self.degree(v)).sum();
        if sum != 2 * self.edge_count() {
            return Err(Error::InvalidGraph("degree sum does not match edge count".into()));
        }
        Ok(())
    }

    /// Text format: first line `n m`, then `m` lines `u v` with `u < v`.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.vertex_count(), self.edge_count());
        for &(a, b) in &self.edges {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let mut hs = header.split_whitespace();
        let n: usize = parse_field(hs.next(), "vertex count")?;
        let m: usize = parse_field(hs.next(), "edge count")?;
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            let mut it = line.split_whitespace();
            let u: usize = parse_field(it.next(), "edge endpoint")?;
            let v: usize = parse_field(it.next(), "edge endpoint")?;
            if u >= v {
                return Err(Error::Parse(format!("edge line `{line}` must satisfy u < v")));
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse(format!("header announces {m} edges, found {}", edges.len())));
        }
        Self::from_edges(n, &edges)
    }

    /// Graph with one extra edge; used by monotonicity checks.
    pub fn with_edge(&self, a: usize, b: usize) -> Result<Self> {
        let mut e = self.edges.clone();
        e.push((a, b));
        Self::from_edges(self.vertex_count(), &e)
    }
}

fn parse_field(tok: Option<&str>, what: &str) -> Result<usize> {
    tok.ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad {what}: {e}")))
}

impl Adjacency for FiniteGraph {
    fn vertex_count(&self) -> usize {
        FiniteGraph::vertex_count(self)
    }
    fn degree(&self, v: usize) -> usize {
        FiniteGraph::degree(self, v)
    }
    fn for_each_neighbor<F: FnMut(usize)>(&self, v: usize, mut f: F) {
        for &u in self.neighbors(v) {
            f(u);
        }
    }
}

/// Bitset of vertices of a host graph with `universe` vertices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSubset {
    universe: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for VertexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 32 {
            write!(f, "VertexSubset{:?}", self.members())
        } else {
            write!(f, "VertexSubset(|F|={} of {})", self.len(), self.universe)
        }
    }
}

impl VertexSubset {
    pub fn empty(universe: usize) -> Self {
        VertexSubset { universe, bits: vec![0; universe.div_ceil(64)] }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for v in 0..universe {
            s.insert(v);
        }
        s
    }

    pub fn from_members(universe: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(universe);
        for v in members {
            if v >= universe {
                return Err(Error::InvalidArgument(format!("vertex {v} outside host of {universe} vertices")));
            }
            s.insert(v);
        }
        Ok(s)
    }

    /// Subset from the low `universe` bits of a mask (bit `i` = vertex `i`).
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        let mut s = Self::empty(universe);
        if universe > 0 {
            s.bits[0] = if universe >= 64 { mask } else { mask & ((1u64 << universe) - 1) };
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.universe && (self.bits[v >> 6] >> (v & 63)) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.bits[v >> 6] |= 1 << (v & 63);
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        self.bits[v >> 6] &= !(1 << (v & 63));
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + t)
                }
            })
        })
    }

    pub fn members(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn complement(&self) -> Self {
        let mut s = self.clone();
        for w in &mut s.bits {
            *w = !*w;
        }
        if self.universe % 64 != 0 {
            let last = s.bits.len() - 1;
            s.bits[last] &= (1u64 << (self.universe % 64)) - 1;
        }
        s
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// Lexicographic comparison of sorted member lists.
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

/// Unordered edges `(u, v)` with `u < v`, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSet {
    pub edges: Vec<(usize, usize)>,
}

impl EdgeSet {
    pub fn len(&self) -> usize {
        self.edges.len()
    }
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Edges with exactly one endpoint in `set`.
pub fn edge_boundary(g: &FiniteGraph, set: &VertexSubset) -> EdgeSet {
    let edges = g
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| set.contains(a) != set.contains(b))
        .collect();
    EdgeSet { edges }
}

/// `|∂F|` over any adjacency; every neighbour of a member must be present.
pub fn boundary_size<G: Adjacency>(g: &G, set: &VertexSubset) -> usize {
    let mut count = 0;
    for v in set.iter() {
        g.for_each_neighbor(v, |u| {
            if !set.contains(u) {
                count += 1;
            }
        });
    }
    count
}

/// Graph induced on `set`, with the map from new indices to host indices.
pub fn induced_subgraph(g: &FiniteGraph, set: &VertexSubset) -> Result<(FiniteGraph, Vec<usize>)> {
    let map: Vec<usize> = set.members();
    if map.is_empty() {
        return Err(Error::InvalidArgument("induced subgraph of an empty set".into()));
    }
    let mut index = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in map.iter().enumerate() {
        index[v] = i;
    }
    let mut edges = Vec::new();
    for &(a, b) in g.edges() {
        if set.contains(a) && set.contains(b) {
            edges.push((index[a], index[b]));
        }
    }
    edges.sort_unstable();
    Ok((FiniteGraph::from_sorted_edges(map.len(), edges), map))
}

pub const UNREACHED: u32 = u32::MAX;

/// Multi-source BFS. When `allowed` is given, the search only expands through
/// vertices in it (sources are always settled).
pub fn bfs_distances<G: Adjacency>(g: &G, sources: &[usize], allowed: Option<&VertexSubset>) -> Vec<u32> {
    let mut dist = vec![UNREACHED; g.vertex_count()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s] == UNREACHED {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let dv = dist[v];
        g.for_each_neighbor(v, |u| {
            if dist[u] == UNREACHED && allowed.is_none_or(|a| a.contains(u)) {
                dist[u] = dv + 1;
                queue.push_back(u);
            }
        });
    }
    dist
}

/// Descriptor of a generated test-suite graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Cycle(usize),
    Path(usize),
    Complete(usize),
    Hypercube(usize),
    /// Box `[0,L1) x ... x [0,Ld)` in the integer lattice.
    Grid(Vec<usize>),
    Petersen,
    RandomRegular { n: usize, d: usize, seed: u64 },
    /// Graph induced on the lamplighter set `F_n`.
    LamplighterWindow(usize),
    /// Truncated canopy tree (binary tree hanging off a ray).
    TreeRay(usize),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Cycle(n) => write!(f, "cycle:{n}"),
            Family::Path(n) => write!(f, "path:{n}"),
            Family::Complete(n) => write!(f, "complete:{n}"),
            Family::Hypercube(k) => write!(f, "hypercube:{k}"),
            Family::Grid(dims) => {
                let d: Vec<String> = dims.iter().map(|x| x.to_string()).collect();
                write!(f, "grid:{}", d.join("x"))
            }
            Family::Petersen => write!(f, "petersen"),
            Family::RandomRegular { n, d, seed } => write!(f, "random-regular:n={n},d={d},seed={seed}"),
            Family::LamplighterWindow(n) => write!(f, "lamplighter-window:{n}"),
            Family::TreeRay(depth) => write!(f, "tree-ray:{depth}"),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidFamily(s.to_string(), msg.to_string());
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s.trim(), ""),
        };
        let int = |a: &str| a.parse::<usize>().map_err(|_| bad("expected a positive integer"));
        let fam = match name {
            "cycle" => Family::Cycle(int(arg)?),
            "path" => Family::Path(int(arg)?),
            "complete" => Family::Complete(int(arg)?),
            "hypercube" => Family::Hypercube(int(arg)?),
            "grid" => Family::Grid(arg.split('x').map(int).collect::<Result<_>>()?),
            "petersen" => Family::Petersen,
            "lamplighter-window" => Family::LamplighterWindow(int(arg)?),
            "tree-ray" => Family::TreeRay(int(arg)?),
            "random-regular" => {
                let (mut n, mut d, mut seed) = (None, None, None);
                for kv in arg.split(',') {
                    let (k, v) = kv.split_once('=').ok_or_else(|| bad("expected key=value pairs"))?;
                    match k.trim() {
                        "n" => n = Some(int(v.trim())?),
                        "d" => d = Some(int(v.trim())?),
                        "seed" => seed = Some(v.trim().parse::<u64>().map_err(|_| bad("bad seed"))?),
                        other => return Err(bad(&format!("unknown key `{other}`"))),
                    }
                }
                Family::RandomRegular {
                    n: n.ok_or_else(|| bad("missing n"))?,
                    d: d.ok_or_else(|| bad("missing d"))?,
                    seed: seed.ok_or_else(|| bad("random family requires a seed"))?,
                }
            }
            _ => return Err(bad("unknown family")),
        };
        Ok(fam)
    }
}

/// Generates a connected graph for `family`; deterministic given the seed.
pub fn generate_family(family: &Family) -> Result<FiniteGraph> {
    let bad = |msg: &str| Error::InvalidFamily(family.to_string(), msg.to_string());
    match *family {
        Family::Cycle(n) => {
            if n < 3 {
                return Err(bad("cycle needs n >= 3"));
            }
            let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            FiniteGraph::from_edges(n, &edges)
        }
        Family::Path(n) => {
            if n < 1 {
                return Err(bad("path needs n >= 1"));
            }
            let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            FiniteGraph::from_edges(n, &edges)
        }
        Family::Complete(n) => {
            if n < 1 {
                return Err(bad("complete graph needs n >= 1"));
            }
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    edges.push((a, b));
                }
            }
            FiniteGraph::from_edges(n, &edges)
        }
        Family::Hypercube(k) => {
            if k < 1 || k > 20 {
                return Err(bad("hypercube dimension must be in 1..=20"));
            }
            let n = 1usize << k;
            let mut edges = Vec::new();
            for v in 0..n {
                for b in 0..k {
                    let u = v ^ (1 << b);
                    if v < u {
                        edges.push((v, u));
                    }
                }
            }
            FiniteGraph::from_edges(n, &edges)
        }
        Family::Grid(ref dims) => {
            if dims.is_empty() || dims.iter().any(|&l| l == 0) {
                return Err(bad("grid side lengths must be positive"));
            }
            let n: usize = dims.iter().product();
            let mut edges = Vec::new();
            let mut stride = 1;
            for &len in dims {
                for v in 0..n {
                    if (v / stride) % len + 1 < len {
                        edges.push((v, v + stride));
                    }
                }
                stride *= len;
            }
            FiniteGraph::from_edges(n, &edges)
        }
        Family::Petersen => {
            let mut edges = Vec::new();
            for i in 0..5 {
                edges.push((i, (i + 1) % 5));
                edges.push((i, i + 5));
                edges.push((5 + i, 5 + (i + 2) % 5));
            }
            FiniteGraph::from_edges(10, &edges)
        }
        Family::RandomRegular { n, d, seed } => random_regular(n, d, seed).map_err(|e| match e {
            Error::InvalidArgument(m) => bad(&m),
            other => other,
        }),
        Family::LamplighterWindow(n) => {
            let w = crate::lazy::lamplighter_window(n, crate::lazy::DEFAULT_VERTEX_BUDGET)?;
            Ok(induced_subgraph(&w.graph, &w.core)?.0)
        }
        Family::TreeRay(depth) => Ok(tree_ray_graph(depth, 0)?.graph),
    }
}

/// Uniform-ish random `d`-regular simple connected graph by the pairing model
/// with rejection.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<FiniteGraph> {
    if n == 0 || d == 0 || d >= n {
        return Err(Error::InvalidArgument("random regular graph needs 0 < d < n".into()));
    }
    if (n * d) % 2 == 1 {
        return Err(Error::InvalidArgument(format!("n*d = {} is odd", n * d)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    for _attempt in 0..100_000 {
        points.shuffle(&mut rng);
        let mut edges: Vec<(usize, usize)> = points.chunks(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))).collect();
        if edges.iter().any(|&(a, b)| a == b) {
            continue;
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let g = FiniteGraph::from_sorted_edges(n, edges);
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::InvalidArgument(format!("no simple connected {d}-regular graph on {n} vertices found")))
}

/// Truncated canopy tree: a spine `s_0 - s_1 - ... - s_H` where `s_k` (k >= 1)
/// also carries a complete binary tree with `2^k - 1` vertices hanging from its
/// root. The hanging tree at `s_m` is the set `T_m`: `2^m - 1` vertices and a
/// single boundary edge.
#[derive(Clone, Debug)]
pub struct TreeRay {
    pub graph: FiniteGraph,
    pub spine: Vec<usize>,
    /// `subtrees[m - 1]` is `T_m` for `m = 1..=depth`.
    pub subtrees: Vec<VertexSubset>,
}

/// `depth` is the largest `m` with a designated `T_m`; `extra_spine` extends
/// the spine beyond `s_depth` by bare ray vertices.
pub fn tree_ray_graph(depth: usize, extra_spine: usize) -> Result<TreeRay> {
    if depth == 0 || depth > 22 {
        return Err(Error::InvalidArgument("tree-ray depth must be in 1..=22".into()));
    }
    let spine_len = depth + 1 + extra_spine;
    let spine: Vec<usize> = (0..spine_len).collect();
    let mut edges: Vec<(usize, usize)> = (1..spine_len).map(|i| (i - 1, i)).collect();
    let mut next = spine_len;
    let mut tree_sets = Vec::new();
    for m in 1..=depth {
        let size = (1usize << m) - 1;
        let root = next;
        // heap layout: node i has children 2i+1, 2i+2
        for i in 0..size {
            for c in [2 * i + 1, 2 * i + 2] {
                if c < size {
                    edges.push((root + i, root + c));
                }
            }
        }
        edges.push((spine[m], root));
        tree_sets.push(root..root + size);
        next += size;
    }
    let graph = FiniteGraph::from_edges(next, &edges)?;
    let subtrees = tree_sets
        .into_iter()
        .map(|r| VertexSubset::from_members(next, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(TreeRay { graph, spine, subtrees })
}

/// Three copies of the canopy truncation with the degree-one tree leaves of the
/// hanging trees identified across copies. This is one concrete regularizing
/// gluing; interior tree vertices get degree 3 and glued leaves degree 3.
pub fn tree_ray_regularized(depth: usize) -> Result<FiniteGraph> {
    let base = tree_ray_graph(depth, 0)?;
    let n = base.graph.vertex_count();
    let is_glued_leaf = |v: usize| base.subtrees.iter().any(|t| t.contains(v)) && base.graph.degree(v) == 1;
    let mut index = vec![[0usize; 3]; n];
    let mut next = 0;
    for v in 0..n {
        if is_glued_leaf(v) {
            index[v] = [next; 3];
            next += 1;
        } else {
            for c in 0..3 {
                index[v][c] = next;
                next += 1;
            }
        }
    }
    let mut edges = Vec::new();
    for &(a, b) in base.graph.edges() {
        for c in 0..3 {
            edges.push((index[a][c], index[b][c]));
        }
    }
    FiniteGraph::from_edges(next, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> FiniteGraph {
        generate_family(&Family::Cycle(n)).unwrap()
    }

    #[test]
    fn family_sizes() {
        let c4 = cycle(4);
        assert_eq!(c4.vertex_count(), 4);
        assert!((0..4).all(|v| c4.degree(v) == 2));
        let k4 = generate_family(&Family::Complete(4)).unwrap();
        assert!((0..4).all(|v| k4.degree(v) == 3));
        let q3 = generate_family(&Family::Hypercube(3)).unwrap();
        assert_eq!((q3.vertex_count(), q3.edge_count()), (8, 12));
        let p = generate_family(&Family::Petersen).unwrap();
        assert_eq!((p.vertex_count(), p.edge_count(), p.regular_degree()), (10, 15, Some(3)));
        let grid = generate_family(&Family::Grid(vec![3, 4])).unwrap();
        assert_eq!((grid.vertex_count(), grid.edge_count()), (12, 17));
        for g in [c4, k4, q3, p, grid] {
            g.validate().unwrap();
            assert!(g.is_connected());
        }
    }

    #[test]
    fn random_regular_is_deterministic_and_valid() {
        let f = Family::RandomRegular { n: 10, d: 3, seed: 7 };
        let a = generate_family(&f).unwrap();
        let b = generate_family(&f).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.regular_degree(), Some(3));
        a.validate().unwrap();
        assert!(matches!(
            generate_family(&Family::RandomRegular { n: 9, d: 3, seed: 1 }),
            Err(Error::InvalidFamily(..))
        ));
    }

    #[test]
    fn family_descriptor_round_trip() {
        for s in ["cycle:12", "hypercube:4", "lamplighter-window:8", "random-regular:n=50,d=4,seed=7", "grid:3x4", "petersen"] {
            let f: Family = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("random-regular:n=5,d=2".parse::<Family>().is_err());
        assert!("moebius:3".parse::<Family>().is_err());
    }

    #[test]
    fn boundary_examples() {
        let c4 = cycle(4);
        assert!(edge_boundary(&c4, &VertexSubset::full(4)).is_empty());
        let single = VertexSubset::from_members(4, [0]).unwrap();
        assert_eq!(edge_boundary(&c4, &single).len(), 2);
        let pair = VertexSubset::from_members(4, [0, 1]).unwrap();
        assert_eq!(edge_boundary(&c4, &pair).edges, vec![(0, 3), (1, 2)]);
        assert_eq!(boundary_size(&c4, &pair), 2);
    }

    #[test]
    fn induced_examples() {
        let c6 = cycle(6);
        let (all, map) = induced_subgraph(&c6, &VertexSubset::full(6)).unwrap();
        assert_eq!(all, c6);
        assert_eq!(map, (0..6).collect::<Vec<_>>());
        let (ind, _) = induced_subgraph(&c6, &VertexSubset::from_members(6, [0, 3]).unwrap()).unwrap();
        assert_eq!((ind.vertex_count(), ind.edge_count()), (2, 0));
        let (p3, map) = induced_subgraph(&c6, &VertexSubset::from_members(6, [1, 2, 3]).unwrap()).unwrap();
        assert_eq!(p3.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(map, vec![1, 2, 3]);
        assert!(induced_subgraph(&c6, &VertexSubset::empty(6)).is_err());
    }

    #[test]
    fn induced_edge_count_identity() {
        let g = generate_family(&Family::Petersen).unwrap();
        for mask in [0b1011u64, 0b1111100000, 0b0101010101, 0b1] {
            let f = VertexSubset::from_mask(10, mask);
            let (ind, _) = induced_subgraph(&g, &f).unwrap();
            let deg_sum: usize = f.iter().map(|v| g.degree(v)).sum();
            assert_eq!(ind.edge_count(), (deg_sum - boundary_size(&g, &f)) / 2);
        }
    }

    #[test]
    fn text_format() {
        let g = generate_family(&Family::Petersen).unwrap();
        assert_eq!(FiniteGraph::from_text(&g.to_text()).unwrap(), g);
        assert!(FiniteGraph::from_text("3 2\n0 1\n1 0\n").is_err());
        assert!(FiniteGraph::from_text("3 2\n0 1\n0 1\n").is_err());
        assert!(FiniteGraph::from_text("3 2\n0 1\n").is_err());
        assert!(FiniteGraph::from_adjacency(&[vec![1], vec![]]).is_err());
    }

    #[test]
    fn tree_ray_subtrees() {
        let tr = tree_ray_graph(4, 2).unwrap();
        tr.graph.validate().unwrap();
        assert!(tr.graph.is_connected());
        for (i, t) in tr.subtrees.iter().enumerate() {
            let m = i + 1;
            assert_eq!(t.len(), (1 << m) - 1);
            assert_eq!(boundary_size(&tr.graph, t), 1);
        }
        let reg = tree_ray_regularized(3).unwrap();
        reg.validate().unwrap();
        assert!(reg.is_connected());
    }

    #[test]
    fn subset_ops() {
        let s = VertexSubset::from_members(70, [0, 5, 64, 69]).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.complement().len(), 66);
        assert!(!s.complement().contains(69));
        assert_eq!(s.members(), vec![0, 5, 64, 69]);
        assert!(VertexSubset::from_members(3, [3]).is_err());
        let a = VertexSubset::from_members(5, [0, 2]).unwrap();
        let b = VertexSubset::from_members(5, [1, 2]).unwrap();
        assert_eq!(a.lex_cmp(&b), std::cmp::Ordering::Less);
    }
}
