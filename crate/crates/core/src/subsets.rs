//! Vertex subset enumeration: all subsets by Gray code on small graphs,
//! connected subsets of bounded size on larger ones.

use crate::error::{Error, Result};
use crate::graph::FiniteGraph;

/// Largest vertex count accepted for exhaustive enumeration.
pub const EXHAUSTIVE_THRESHOLD: usize = 20;

/// Visits every nonempty subset as `(mask, size, boundary)` where bit `v` of
/// `mask` marks vertex `v`. Order is the reflected Gray code.
pub fn for_each_subset<F: FnMut(u64, usize, usize)>(g: &FiniteGraph, threshold: usize, mut visit: F) -> Result<()> {
    let n = g.vertex_count();
    if n > threshold || n > 30 {
        return Err(Error::TooLarge { vertices: n, threshold: threshold.min(30) });
    }
    let nbmask: Vec<u64> = (0..n).map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u)).collect();
    let mut mask = 0u64;
    let mut size = 0usize;
    let mut boundary = 0usize;
    for i in 1u64..(1u64 << n) {
        let v = i.trailing_zeros() as usize;
        let inside = (nbmask[v] & mask).count_ones() as usize;
        if mask >> v & 1 == 0 {
            boundary = boundary + g.degree(v) - 2 * inside;
            size += 1;
        } else {
            boundary = boundary + 2 * inside - g.degree(v);
            size -= 1;
        }
        mask ^= 1 << v;
        visit(mask, size, boundary);
    }
    Ok(())
}

/// Lexicographic order of the sorted member lists of two masks.
pub fn mask_lex_less(a: u64, b: u64) -> bool {
    let x = a ^ b;
    if x == 0 {
        return false;
    }
    let i = x.trailing_zeros();
    let above = if i >= 63 { 0 } else { !0u64 << (i + 1) };
    if a >> i & 1 == 1 {
        // b skips i: b is smaller only if it has nothing left
        b & above != 0
    } else {
        a & above == 0
    }
}

/// Visits each connected vertex set of size at most `k` exactly once, as a
/// sorted member list (ESU enumeration).
pub fn for_each_connected_subset<F: FnMut(&[usize])>(g: &FiniteGraph, k: usize, mut visit: F) {
    let n = g.vertex_count();
    let mut in_set = vec![false; n];
    let mut near = vec![0u32; n];
    let mut members = Vec::with_capacity(k);
    for v in 0..n {
        let ext: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| u > v).collect();
        members.push(v);
        in_set[v] = true;
        for &u in g.neighbors(v) {
            near[u] += 1;
        }
        extend(g, k, v, &mut members, &mut in_set, &mut near, ext, &mut visit);
        for &u in g.neighbors(v) {
            near[u] -= 1;
        }
        in_set[v] = false;
        members.pop();
    }
}

#[allow(clippy::too_many_arguments)]
fn extend<F: FnMut(&[usize])>(
    g: &FiniteGraph,
    k: usize,
    root: usize,
    members: &mut Vec<usize>,
    in_set: &mut [bool],
    near: &mut [u32],
    mut ext: Vec<usize>,
    visit: &mut F,
) {
    let mut sorted = members.clone();
    sorted.sort_unstable();
    visit(&sorted);
    if members.len() == k {
        return;
    }
    while let Some(w) = ext.pop() {
        // exclusive neighbours of w: not in the set, not adjacent to it
        let mut next = ext.clone();
        for &u in g.neighbors(w) {
            if u > root && !in_set[u] && near[u] == 0 && !next.contains(&u) {
                next.push(u);
            }
        }
        members.push(w);
        in_set[w] = true;
        for &u in g.neighbors(w) {
            near[u] += 1;
        }
        extend(g, k, root, members, in_set, near, next, visit);
        for &u in g.neighbors(w) {
            near[u] -= 1;
        }
        in_set[w] = false;
        members.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{boundary_size, generate_family, Family, VertexSubset};
    use std::collections::HashSet;

    #[test]
    fn gray_boundaries_are_exact() {
        let g = generate_family(&Family::Petersen).unwrap();
        let mut count = 0;
        for_each_subset(&g, 20, |mask, size, b| {
            count += 1;
            let s = VertexSubset::from_mask(10, mask);
            assert_eq!(s.len(), size);
            assert_eq!(boundary_size(&g, &s), b);
        })
        .unwrap();
        assert_eq!(count, 1023);
        let big = generate_family(&Family::Cycle(21)).unwrap();
        assert!(matches!(for_each_subset(&big, 20, |_, _, _| {}), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn lex_order_of_masks() {
        let all: Vec<u64> = (1..64).collect();
        for &a in &all {
            for &b in &all {
                let la = VertexSubset::from_mask(6, a);
                let lb = VertexSubset::from_mask(6, b);
                assert_eq!(mask_lex_less(a, b), la.lex_cmp(&lb) == std::cmp::Ordering::Less, "{a:b} {b:b}");
            }
        }
    }

    #[test]
    fn connected_subsets_match_brute_force() {
        for fam in [Family::Petersen, Family::Grid(vec![3, 3]), Family::Cycle(7)] {
            let g = generate_family(&fam).unwrap();
            let n = g.vertex_count();
            let mut found = HashSet::new();
            for_each_connected_subset(&g, 4, |s| {
                assert!(found.insert(s.to_vec()), "duplicate {s:?}");
            });
            let mut expect = HashSet::new();
            for mask in 1u64..(1 << n) {
                let set = VertexSubset::from_mask(n, mask);
                if set.len() > 4 {
                    continue;
                }
                let members = set.members();
                let (sub, _) = crate::graph::induced_subgraph(&g, &set).unwrap();
                if sub.is_connected() {
                    expect.insert(members);
                }
            }
            assert_eq!(found, expect);
        }
    }
}
