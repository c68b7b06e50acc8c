//! Deterministic instance generators for tests and verification suites:
//! seeded random graphs and trees, and exhaustive non-isomorphic connected
//! graph enumeration at desk scale.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::LabeledGraph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi graph with edge probability `p`, no marks.
pub fn gnp(n: usize, p: f64, seed: u64) -> LabeledGraph {
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if r.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    LabeledGraph::new(n, edges, [], None).unwrap()
}

/// First connected `gnp` sample at or after `seed` (derived sub-seeds).
pub fn gnp_connected(n: usize, p: f64, seed: u64) -> LabeledGraph {
    for attempt in 0..10_000u64 {
        let g = gnp(n, p, seed.wrapping_mul(1_000_003).wrapping_add(attempt));
        if g.is_connected() {
            return g;
        }
    }
    panic!("no connected sample for n={n}, p={p}");
}

/// Uniform random labeled tree on `n` vertices via a Prüfer sequence.
pub fn random_tree_edges(n: usize, seed: u64) -> Vec<(u32, u32)> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    assert!(n >= 1);
    if n == 1 {
        return Vec::new();
    }
    if n == 2 {
        return vec![(0, 1)];
    }
    let mut r = rng(seed);
    let seq: Vec<usize> = (0..n - 2).map(|_| r.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &seq {
        degree[v] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> = (0..n)
        .filter(|&v| degree[v] == 1)
        .map(Reverse)
        .collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &seq {
        let Reverse(leaf) = leaves.pop().expect("leaf available");
        edges.push((leaf.min(v) as u32, leaf.max(v) as u32));
        degree[leaf] -= 1;
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.push(Reverse(v));
        }
    }
    let rem: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    debug_assert_eq!(rem.len(), 2);
    edges.push((rem[0] as u32, rem[1] as u32));
    edges
}

/// Random subset of `0..n` where each element is included with probability `p`.
pub fn random_subset(n: usize, p: f64, seed: u64) -> Vec<u32> {
    let mut r = rng(seed);
    (0..n as u32).filter(|_| r.gen_bool(p)).collect()
}

// ---------------------------------------------------------------------------
// Exhaustive non-isomorphic graph enumeration (desk scale, n <= 9)
// ---------------------------------------------------------------------------

fn pair_index(n: usize, u: usize, v: usize) -> usize {
    let (a, b) = (u.min(v), u.max(v));
    // Index into the upper triangle, row-major.
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

fn degrees(n: usize, mask: u64) -> Vec<u32> {
    let mut deg = vec![0u32; n];
    for u in 0..n {
        for v in (u + 1)..n {
            if mask >> pair_index(n, u, v) & 1 == 1 {
                deg[u] += 1;
                deg[v] += 1;
            }
        }
    }
    deg
}

fn relabel(n: usize, mask: u64, perm: &[usize]) -> u64 {
    let mut out = 0u64;
    for u in 0..n {
        for v in (u + 1)..n {
            if mask >> pair_index(n, u, v) & 1 == 1 {
                out |= 1 << pair_index(n, perm[u], perm[v]);
            }
        }
    }
    out
}

/// Canonical form: minimum adjacency bitmask over all permutations that sort
/// the degree sequence descending. The candidate set is isomorphism-invariant,
/// so equal canonical forms characterize isomorphic graphs.
fn canonical_form(n: usize, mask: u64) -> u64 {
    let deg = degrees(n, mask);
    // Vertices grouped by degree, descending.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(deg[v]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match groups.last() {
            Some(g) if deg[g[0]] == deg[v] => groups.last_mut().unwrap().push(v),
            _ => groups.push(vec![v]),
        }
    }
    let mut best = u64::MAX;
    // Iterate the cartesian product of within-group permutations.
    let mut perms: Vec<Vec<Vec<usize>>> = Vec::new();
    for g in &groups {
        perms.push(permutations(g));
    }
    let mut idx = vec![0usize; groups.len()];
    loop {
        let mut perm = vec![0usize; n];
        let mut pos = 0usize;
        for (gi, g) in groups.iter().enumerate() {
            for (slot, &orig) in perms[gi][idx[gi]].iter().enumerate() {
                perm[orig] = pos + slot;
            }
            pos += g.len();
        }
        best = best.min(relabel(n, mask, &perm));
        // Advance the mixed-radix counter.
        let mut carry = true;
        for (gi, p) in perms.iter().enumerate() {
            if carry {
                idx[gi] += 1;
                if idx[gi] == p.len() {
                    idx[gi] = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            break;
        }
    }
    best
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

fn mask_connected(n: usize, mask: u64) -> bool {
    if n == 0 {
        return true;
    }
    let mut seen = 1u64;
    let mut stack = vec![0usize];
    while let Some(u) = stack.pop() {
        for v in 0..n {
            if v != u && seen >> v & 1 == 0 && mask >> pair_index(n, u.min(v), u.max(v)) & 1 == 1 {
                seen |= 1 << v;
                stack.push(v);
            }
        }
    }
    seen.count_ones() as usize == n
}

/// All non-isomorphic connected graphs on exactly `n` vertices, as canonical
/// edge lists. Exhaustive by vertex augmentation with canonical-form dedup.
pub fn connected_graphs(n: usize) -> Vec<Vec<(u32, u32)>> {
    assert!(n >= 1 && n <= 9, "desk-scale enumeration only");
    let mut level: Vec<u64> = vec![0]; // the single graph on 1 vertex
    for m in 2..=n {
        let mut next = std::collections::HashSet::new();
        for &g in &level {
            // New vertex m-1 attaches to any subset of the old ones.
            for sub in 0u64..(1 << (m - 1)) {
                let mut mask = 0u64;
                // Re-embed the old mask into the m-vertex pair indexing.
                for u in 0..m - 1 {
                    for v in (u + 1)..m - 1 {
                        if g >> pair_index(m - 1, u, v) & 1 == 1 {
                            mask |= 1 << pair_index(m, u, v);
                        }
                    }
                }
                for u in 0..m - 1 {
                    if sub >> u & 1 == 1 {
                        mask |= 1 << pair_index(m, u, m - 1);
                    }
                }
                next.insert(canonical_form(m, mask));
            }
        }
        let mut v: Vec<u64> = next.into_iter().collect();
        v.sort_unstable();
        level = v;
    }
    level
        .into_iter()
        .filter(|&mask| mask_connected(n, mask))
        .map(|mask| {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if mask >> pair_index(n, u, v) & 1 == 1 {
                        edges.push((u as u32, v as u32));
                    }
                }
            }
            edges
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_generator_yields_trees() {
        for seed in 0..50 {
            let n = 2 + (seed as usize % 40);
            let edges = random_tree_edges(n, seed);
            assert_eq!(edges.len(), n - 1);
            let g = LabeledGraph::new(n, edges, [], None).unwrap();
            assert!(g.is_connected());
        }
    }

    #[test]
    fn connected_graph_counts_match_known_sequence() {
        // Unlabeled connected simple graphs on n = 1..=7 vertices.
        let expected = [1usize, 1, 2, 6, 21, 112, 853];
        for (i, &want) in expected.iter().enumerate() {
            assert_eq!(connected_graphs(i + 1).len(), want, "n = {}", i + 1);
        }
    }
}
