//! Lazily generated infinite graphs and their finite windows.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::graph::{Adjacency, FiniteGraph, VertexSubset};

/// Default cap on materialized vertices.
pub const DEFAULT_VERTEX_BUDGET: usize = 50_000_000;

pub trait LazyGraph {
    type Label: Clone + Eq + Hash + Ord + std::fmt::Debug;

    fn neighbors(&self, x: &Self::Label) -> Vec<Self::Label>;
    fn degree_bound(&self) -> usize;
    fn encode(&self, x: &Self::Label) -> Vec<u8>;
    fn decode(&self, bytes: &[u8]) -> Result<Self::Label>;
    /// Whether every vertex looks the same (one ball center suffices).
    fn is_vertex_transitive(&self) -> bool {
        false
    }
}

/// Vertex of the lamplighter group: lit lamp positions (sorted, distinct) and
/// the lamplighter position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LampLabel {
    pub lamps: Vec<i64>,
    pub pos: i64,
}

impl LampLabel {
    pub fn identity() -> Self {
        LampLabel { lamps: Vec::new(), pos: 0 }
    }

    pub fn toggled(&self) -> Self {
        let mut lamps = self.lamps.clone();
        match lamps.binary_search(&self.pos) {
            Ok(i) => {
                lamps.remove(i);
            }
            Err(i) => lamps.insert(i, self.pos),
        }
        LampLabel { lamps, pos: self.pos }
    }

    pub fn moved(&self, step: i64) -> Self {
        LampLabel { lamps: self.lamps.clone(), pos: self.pos + step }
    }
}

/// Cayley graph of `C2 wr Z` with the switch-or-walk generators.
#[derive(Clone, Copy, Debug, Default)]
pub struct Lamplighter;

impl LazyGraph for Lamplighter {
    type Label = LampLabel;

    fn neighbors(&self, x: &LampLabel) -> Vec<LampLabel> {
        vec![x.toggled(), x.moved(1), x.moved(-1)]
    }

    fn degree_bound(&self) -> usize {
        3
    }

    fn encode(&self, x: &LampLabel) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 8 * (x.lamps.len() + 1));
        out.extend_from_slice(&(x.lamps.len() as u32).to_le_bytes());
        for &l in &x.lamps {
            out.extend_from_slice(&l.to_le_bytes());
        }
        out.extend_from_slice(&x.pos.to_le_bytes());
        out
    }

    fn decode(&self, bytes: &[u8]) -> Result<LampLabel> {
        let bad = || Error::Parse("malformed lamplighter label".into());
        let count = u32::from_le_bytes(bytes.get(..4).ok_or_else(bad)?.try_into().unwrap()) as usize;
        if bytes.len() != 4 + 8 * (count + 1) {
            return Err(bad());
        }
        let word = |i: usize| i64::from_le_bytes(bytes[4 + 8 * i..12 + 8 * i].try_into().unwrap());
        let lamps: Vec<i64> = (0..count).map(word).collect();
        if lamps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("lamp positions must be strictly increasing".into()));
        }
        Ok(LampLabel { lamps, pos: word(count) })
    }

    fn is_vertex_transitive(&self) -> bool {
        true
    }
}

/// The cycle `C_n` presented lazily (labels `0..n`).
#[derive(Clone, Copy, Debug)]
pub struct LazyCycle(pub usize);

impl LazyGraph for LazyCycle {
    type Label = usize;

    fn neighbors(&self, &x: &usize) -> Vec<usize> {
        let n = self.0;
        let mut v = vec![(x + 1) % n, (x + n - 1) % n];
        v.dedup();
        v
    }
    fn degree_bound(&self) -> usize {
        2
    }
    fn encode(&self, x: &usize) -> Vec<u8> {
        (*x as u64).to_le_bytes().to_vec()
    }
    fn decode(&self, bytes: &[u8]) -> Result<usize> {
        let arr: [u8; 8] = bytes.try_into().map_err(|_| Error::Parse("cycle label needs 8 bytes".into()))?;
        let x = u64::from_le_bytes(arr) as usize;
        if x >= self.0 {
            return Err(Error::Parse(format!("cycle label {x} out of range")));
        }
        Ok(x)
    }
    fn is_vertex_transitive(&self) -> bool {
        true
    }
}

/// The integer lattice `Z^d` with unit steps.
#[derive(Clone, Copy, Debug)]
pub struct Lattice(pub usize);

impl LazyGraph for Lattice {
    type Label = Vec<i64>;

    fn neighbors(&self, x: &Vec<i64>) -> Vec<Vec<i64>> {
        let mut out = Vec::with_capacity(2 * self.0);
        for i in 0..self.0 {
            for s in [1, -1] {
                let mut y = x.clone();
                y[i] += s;
                out.push(y);
            }
        }
        out
    }
    fn degree_bound(&self) -> usize {
        2 * self.0
    }
    fn encode(&self, x: &Vec<i64>) -> Vec<u8> {
        x.iter().flat_map(|c| c.to_le_bytes()).collect()
    }
    fn decode(&self, bytes: &[u8]) -> Result<Vec<i64>> {
        if bytes.len() != 8 * self.0 {
            return Err(Error::Parse("lattice label has wrong length".into()));
        }
        Ok(bytes.chunks(8).map(|c| i64::from_le_bytes(c.try_into().unwrap())).collect())
    }
    fn is_vertex_transitive(&self) -> bool {
        true
    }
}

/// A finite piece of a lazy graph around a core set.
#[derive(Clone, Debug)]
pub struct Window<L> {
    pub graph: FiniteGraph,
    pub labels: Vec<L>,
    pub core: VertexSubset,
    pub margin: usize,
    /// Sphere sizes `|S_0|, |S_1|, ...` when built as a ball.
    pub layers: Vec<usize>,
}

impl<L: Clone + Eq + Hash> Window<L> {
    pub fn index_of(&self, x: &L) -> Option<usize> {
        self.labels.iter().position(|y| y == x)
    }

    pub fn label_index(&self) -> HashMap<L, usize> {
        self.labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect()
    }

    /// Degree every vertex has in the ambient lazy graph, when uniform.
    pub fn ambient_degree(&self) -> usize {
        (0..self.graph.vertex_count()).map(|v| self.graph.degree(v)).max().unwrap_or(0)
    }
}

/// Breadth-first materialization from `seeds` out to `depth` steps. Returns
/// labels in BFS order and per-vertex distance.
fn explore<G: LazyGraph>(g: &G, seeds: &[G::Label], depth: usize, budget: usize) -> Result<(Vec<G::Label>, Vec<usize>, HashMap<G::Label, usize>)> {
    let mut index: HashMap<G::Label, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut dist = Vec::new();
    for s in seeds {
        if !index.contains_key(s) {
            index.insert(s.clone(), labels.len());
            labels.push(s.clone());
            dist.push(0);
        }
    }
    let mut head = 0;
    while head < labels.len() {
        if dist[head] < depth {
            for y in g.neighbors(&labels[head]) {
                if !index.contains_key(&y) {
                    if labels.len() >= budget {
                        return Err(Error::Budget { needed: labels.len() + 1, budget });
                    }
                    index.insert(y.clone(), labels.len());
                    labels.push(y);
                    dist.push(dist[head] + 1);
                }
            }
        }
        head += 1;
    }
    Ok((labels, dist, index))
}

fn window_from<G: LazyGraph>(g: &G, labels: Vec<G::Label>, index: &HashMap<G::Label, usize>, core: VertexSubset, margin: usize, layers: Vec<usize>) -> Result<Window<G::Label>> {
    let mut edges = Vec::new();
    for (i, x) in labels.iter().enumerate() {
        for y in g.neighbors(x) {
            if let Some(&j) = index.get(&y) {
                if i < j {
                    edges.push((i, j));
                }
            }
        }
    }
    let graph = FiniteGraph::from_edges(labels.len(), &edges)?;
    Ok(Window { graph, labels, core, margin, layers })
}

/// Ball `B_center(radius)` as core, with a collar of width one.
pub fn materialize_ball<G: LazyGraph>(g: &G, center: &G::Label, radius: usize, budget: usize) -> Result<Window<G::Label>> {
    let (labels, dist, index) = explore(g, std::slice::from_ref(center), radius + 1, budget)?;
    let mut layers = vec![0usize; radius + 1];
    let mut core = VertexSubset::empty(labels.len());
    for (i, &d) in dist.iter().enumerate() {
        if d <= radius {
            layers[d] += 1;
            core.insert(i);
        }
    }
    window_from(g, labels, &index, core, 1, layers)
}

/// Window whose core is the given label set, with a collar of width `margin`.
pub fn materialize_set<G: LazyGraph>(g: &G, core_labels: &[G::Label], margin: usize, budget: usize) -> Result<Window<G::Label>> {
    if margin == 0 {
        return Err(Error::InvalidArgument("window margin must be at least 1".into()));
    }
    let (labels, _dist, index) = explore(g, core_labels, margin, budget)?;
    let core = VertexSubset::from_members(labels.len(), core_labels.iter().map(|l| index[l]))?;
    window_from(g, labels, &index, core, margin, Vec::new())
}

/// Core `F_n = {(f, z) : z in [1, n], supp f in [1, n]}` plus its outer
/// neighbours `z in {0, n+1}`. Core vertex `(f, z)` has index `f * n + z - 1`
/// where bit `i` of `f` is the lamp at position `i + 1`.
pub fn lamplighter_window(n: usize, budget: usize) -> Result<Window<LampLabel>> {
    if n == 0 {
        return Err(Error::InvalidArgument("lamplighter window needs n >= 1".into()));
    }
    let states = checked_states(n, budget)?;
    let core_n = n * states;
    let total = core_n + 2 * states;
    let mut edges = Vec::with_capacity(3 * core_n / 2 + 2 * states);
    for f in 0..states {
        for z in 1..=n {
            let v = f * n + z - 1;
            let t = (f ^ (1 << (z - 1))) * n + z - 1;
            if v < t {
                edges.push((v, t));
            }
            if z < n {
                edges.push((v, v + 1));
            }
        }
        edges.push((f * n, core_n + f));
        edges.push((f * n + n - 1, core_n + states + f));
    }
    let graph = FiniteGraph::from_edges(total, &edges)?;
    let mut labels = Vec::with_capacity(total);
    let lamps_of = |f: usize| -> Vec<i64> { (0..n).filter(|i| f >> i & 1 == 1).map(|i| i as i64 + 1).collect() };
    for f in 0..states {
        for z in 1..=n {
            labels.push(LampLabel { lamps: lamps_of(f), pos: z as i64 });
        }
    }
    for (pos, _) in [(0i64, ()), (n as i64 + 1, ())] {
        for f in 0..states {
            labels.push(LampLabel { lamps: lamps_of(f), pos });
        }
    }
    let core = VertexSubset::from_members(total, 0..core_n)?;
    Ok(Window { graph, labels, core, margin: 1, layers: Vec::new() })
}

fn checked_states(n: usize, budget: usize) -> Result<usize> {
    if n >= 40 {
        return Err(Error::Budget { needed: usize::MAX, budget });
    }
    let states = 1usize << n;
    let needed = (n + 2) * states;
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    Ok(states)
}

/// Implicit version of [`lamplighter_window`] for windows too large to store
/// as adjacency lists. Same vertex numbering; collar vertices only see their
/// core neighbour.
#[derive(Clone, Copy, Debug)]
pub struct LamplighterBox {
    pub n: usize,
}

impl LamplighterBox {
    pub fn new(n: usize, budget: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("lamplighter window needs n >= 1".into()));
        }
        checked_states(n, budget)?;
        Ok(LamplighterBox { n })
    }

    pub fn states(&self) -> usize {
        1 << self.n
    }

    pub fn core_len(&self) -> usize {
        self.n << self.n
    }

    /// Index of core vertex with lamp mask `f` and position `z in [1, n]`.
    #[inline]
    pub fn index(&self, f: usize, z: usize) -> usize {
        f * self.n + z - 1
    }

    /// `(f, z)` of a core vertex.
    #[inline]
    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v / self.n, v % self.n + 1)
    }

    pub fn is_core(&self, v: usize) -> bool {
        v < self.core_len()
    }

    pub fn label(&self, v: usize) -> LampLabel {
        let (f, pos) = if self.is_core(v) {
            let (f, z) = self.coords(v);
            (f, z as i64)
        } else {
            let c = v - self.core_len();
            if c < self.states() {
                (c, 0)
            } else {
                (c - self.states(), self.n as i64 + 1)
            }
        };
        let lamps = (0..self.n).filter(|i| f >> i & 1 == 1).map(|i| i as i64 + 1).collect();
        LampLabel { lamps, pos }
    }
}

impl Adjacency for LamplighterBox {
    fn vertex_count(&self) -> usize {
        self.core_len() + 2 * self.states()
    }

    fn degree(&self, v: usize) -> usize {
        if self.is_core(v) {
            3
        } else {
            1
        }
    }

    #[inline]
    fn for_each_neighbor<F: FnMut(usize)>(&self, v: usize, mut f: F) {
        let n = self.n;
        let core = self.core_len();
        if v < core {
            let (mask, z) = self.coords(v);
            f((mask ^ (1 << (z - 1))) * n + z - 1);
            f(if z < n { v + 1 } else { core + self.states() + mask });
            f(if z > 1 { v - 1 } else { core + mask });
        } else {
            let c = v - core;
            if c < self.states() {
                f(c * n);
            } else {
                f((c - self.states()) * n + n - 1);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::boundary_size;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lamplighter_neighbors_of_identity() {
        let nb = Lamplighter.neighbors(&LampLabel::identity());
        assert_eq!(
            nb,
            vec![
                LampLabel { lamps: vec![0], pos: 0 },
                LampLabel { lamps: vec![], pos: 1 },
                LampLabel { lamps: vec![], pos: -1 },
            ]
        );
    }

    #[test]
    fn lamplighter_symmetry_and_codec() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100_000 {
            let mut lamps: Vec<i64> = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(-20..20)).collect();
            lamps.sort_unstable();
            lamps.dedup();
            let x = LampLabel { lamps, pos: rng.gen_range(-25..25) };
            assert_eq!(Lamplighter.decode(&Lamplighter.encode(&x)).unwrap(), x);
            let nb = Lamplighter.neighbors(&x);
            assert_eq!(nb.len(), 3);
            for y in nb {
                assert!(Lamplighter.neighbors(&y).contains(&x));
            }
        }
        assert!(Lamplighter.decode(&[1, 0]).is_err());
    }

    #[test]
    fn ball_sizes() {
        let id = LampLabel::identity();
        let sizes: Vec<usize> = (0..=3).map(|r| materialize_ball(&Lamplighter, &id, r, 1000).unwrap().core.len()).collect();
        assert_eq!(&sizes[..3], &[1, 4, 10]);
        let w = materialize_ball(&Lamplighter, &id, 4, 1000).unwrap();
        let mut acc = 0;
        for (r, s) in w.layers.iter().enumerate() {
            acc += s;
            assert_eq!(acc, sizes.get(r).copied().unwrap_or(acc));
        }
        assert!(matches!(materialize_ball(&Lamplighter, &id, 10, 50), Err(Error::Budget { .. })));
    }

    #[test]
    fn lamplighter_window_counts() {
        for (n, size, boundary) in [(1, 2, 4), (3, 24, 16)] {
            let w = lamplighter_window(n, 1 << 20).unwrap();
            assert_eq!(w.core.len(), size);
            assert_eq!(boundary_size(&w.graph, &w.core), boundary);
            w.graph.validate().unwrap();
        }
        assert!(matches!(lamplighter_window(12, 1000), Err(Error::Budget { .. })));
    }

    #[test]
    fn window_matches_lazy_neighbors() {
        let w = lamplighter_window(4, 1 << 20).unwrap();
        let idx = w.label_index();
        for v in w.core.iter() {
            let mut expect: Vec<usize> = Lamplighter.neighbors(&w.labels[v]).iter().map(|l| idx[l]).collect();
            expect.sort_unstable();
            assert_eq!(w.graph.neighbors(v), &expect[..]);
        }
    }

    #[test]
    fn implicit_box_matches_window() {
        let n = 5;
        let w = lamplighter_window(n, 1 << 20).unwrap();
        let b = LamplighterBox::new(n, 1 << 20).unwrap();
        assert_eq!(b.vertex_count(), w.graph.vertex_count());
        for v in 0..b.vertex_count() {
            let mut nb = Vec::new();
            b.for_each_neighbor(v, |u| nb.push(u));
            nb.sort_unstable();
            assert_eq!(nb, w.graph.neighbors(v));
            assert_eq!(b.label(v), w.labels[v]);
        }
    }

    #[test]
    fn materialized_set_has_full_core_neighbourhoods() {
        let core: Vec<Vec<i64>> = (0..5).flat_map(|x| (0..5).map(move |y| vec![x, y])).collect();
        let w = materialize_set(&Lattice(2), &core, 2, 10_000).unwrap();
        for v in w.core.iter() {
            assert_eq!(w.graph.degree(v), 4);
        }
        assert_eq!(boundary_size(&w.graph, &w.core), 20);
        let c = materialize_ball(&LazyCycle(4), &0, 2, 100).unwrap();
        assert_eq!(c.graph.vertex_count(), 4);
    }
}
