//! Parity-aware cycle primitives: theta graphs and the even A-cycle they
//! always contain, a--b--c paths with their Menger obstruction, theta
//! assembly from a cycle plus an ear, and exact cycle enumeration.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::flow::FlowNet;
use crate::graph::{edge, Cycle, GraphError, LabeledGraph};

// ---------------------------------------------------------------------------
// Theta graphs
// ---------------------------------------------------------------------------

/// A theta subgraph: two branch vertices joined by three internally disjoint
/// paths, annotated with which paths meet the label set `A` (endpoints
/// included).
#[derive(Clone, Debug)]
pub struct ThetaWitness {
    pub branch_u: u32,
    pub branch_v: u32,
    /// Each path runs from `branch_u` to `branch_v`, endpoints included.
    pub paths: [Vec<u32>; 3],
    pub a_flags: [bool; 3],
}

impl ThetaWitness {
    pub fn new(
        host: &LabeledGraph,
        branch_u: u32,
        branch_v: u32,
        paths: [Vec<u32>; 3],
    ) -> Result<Self, GraphError> {
        let a_flags = [
            paths[0].iter().any(|v| host.is_a(*v)),
            paths[1].iter().any(|v| host.is_a(*v)),
            paths[2].iter().any(|v| host.is_a(*v)),
        ];
        let theta = Self { branch_u, branch_v, paths, a_flags };
        theta.validate_in(host)?;
        Ok(theta)
    }

    pub fn path_len(&self, i: usize) -> usize {
        self.paths[i].len() - 1
    }

    /// Structural validation against a host graph: distinct branch vertices,
    /// paths sharing exactly the branch vertices, real edges, and at most one
    /// path of length one (simplicity).
    pub fn validate_in(&self, host: &LabeledGraph) -> Result<(), GraphError> {
        let fail = |msg: String| Err(GraphError::Invariant(msg));
        if self.branch_u == self.branch_v {
            return fail("theta branch vertices coincide".into());
        }
        let mut interior_seen: BTreeSet<u32> = BTreeSet::new();
        let mut short = 0usize;
        for (i, p) in self.paths.iter().enumerate() {
            if p.len() < 2 || p[0] != self.branch_u || p[p.len() - 1] != self.branch_v {
                return fail(format!("theta path {i} does not join the branch vertices"));
            }
            if p.len() == 2 {
                short += 1;
            }
            let mut local: BTreeSet<u32> = BTreeSet::new();
            for w in p.windows(2) {
                if !host.has_edge(w[0], w[1]) {
                    return Err(GraphError::NoSuchEdge(w[0], w[1]));
                }
            }
            for &v in p {
                if !local.insert(v) {
                    return fail(format!("theta path {i} repeats vertex {v}"));
                }
            }
            for &v in &p[1..p.len() - 1] {
                if v == self.branch_u || v == self.branch_v {
                    return fail(format!("branch vertex {v} interior to path {i}"));
                }
                if !interior_seen.insert(v) {
                    return fail(format!("theta paths share interior vertex {v}"));
                }
            }
        }
        if short > 1 {
            return fail("more than one unsubdivided parallel edge".into());
        }
        Ok(())
    }

    /// Edge sets of the three paths, canonical form.
    pub fn edge_sets(&self) -> [Vec<(u32, u32)>; 3] {
        let mk = |p: &Vec<u32>| {
            let mut es: Vec<(u32, u32)> = p.windows(2).map(|w| edge(w[0], w[1])).collect();
            es.sort_unstable();
            es
        };
        [mk(&self.paths[0]), mk(&self.paths[1]), mk(&self.paths[2])]
    }
}

/// Extract an even A-cycle from a theta graph, at least two of whose paths
/// meet `a`. Among the unions of two paths, the lexicographically smallest
/// even index pair is returned.
pub fn even_a_cycle_from_theta(
    host: &LabeledGraph,
    theta: &ThetaWitness,
    a: &BTreeSet<u32>,
) -> Result<Cycle, GraphError> {
    theta.validate_in(host)?;
    let meets: Vec<bool> = theta
        .paths
        .iter()
        .map(|p| p.iter().any(|v| a.contains(v)))
        .collect();
    if meets.iter().filter(|&&m| m).count() < 2 {
        return Err(GraphError::Precondition(
            "fewer than two theta paths meet A".into(),
        ));
    }
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let len = theta.path_len(i) + theta.path_len(j);
        if len % 2 != 0 {
            continue;
        }
        // Walk path i forward and path j backward, dropping the repeated
        // branch vertices.
        let mut vs: Vec<u32> = theta.paths[i].clone();
        vs.pop();
        let mut back = theta.paths[j].clone();
        back.reverse();
        back.pop();
        vs.extend(back);
        let cycle = Cycle::new(host, vs)?;
        debug_assert!(cycle.is_even());
        debug_assert!(cycle.meets(a));
        return Ok(cycle);
    }
    // Two of the three path lengths always share a parity.
    Err(GraphError::Invariant(
        "no even union of theta paths; parity pigeonhole violated".into(),
    ))
}

// ---------------------------------------------------------------------------
// a--b--c paths
// ---------------------------------------------------------------------------

/// Result of [`abc_path`]: either a path visiting `a`, `b`, `c` in order, or
/// a vertex (other than `b`) whose removal separates `b` from `{a, c}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AbcOutcome {
    Path(Vec<u32>),
    Separator(u32),
}

/// Find a path from `a` through `b` to `c`, or the single-vertex obstruction.
///
/// Two internally disjoint `b`--`{a,c}` paths are computed by unit vertex
/// capacity flow against a contracted super-sink; if both land on the same
/// endpoint the third path is spliced in at its first meeting point,
/// measured from the far endpoint.
pub fn abc_path(g: &LabeledGraph, a: u32, b: u32, c: u32) -> Result<AbcOutcome, GraphError> {
    if a == b || b == c || a == c {
        return Err(GraphError::Precondition("a, b, c must be distinct".into()));
    }
    let n = g.n();
    // Node layout: in(v) = 2v, out(v) = 2v + 1, sink = 2n.
    let sink = 2 * n;
    let mut net = FlowNet::new(2 * n + 1);
    for v in 0..n as u32 {
        if v == a || v == b || v == c {
            continue;
        }
        net.add_arc(2 * v as usize, 2 * v as usize + 1, 1);
    }
    net.add_arc(2 * a as usize, sink, 2);
    net.add_arc(2 * c as usize, sink, 2);
    for &(u, v) in g.edges() {
        for (x, y) in [(u, v), (v, u)] {
            // No arcs out of a or c (paths stop on first touch), none into b.
            if x == a || x == c || y == b {
                continue;
            }
            net.add_arc(2 * x as usize + 1, 2 * y as usize, 1);
        }
    }
    let source = 2 * b as usize + 1;
    let f = net.max_flow(source, sink, 2);

    if f < 2 {
        // Deterministic sweep for a valid separator.
        for x in 0..n as u32 {
            if x == b {
                continue;
            }
            let reach_a = a != x && g.bfs_path(b, a, |v| v != x).is_some();
            let reach_c = c != x && g.bfs_path(b, c, |v| v != x).is_some();
            if !reach_a && !reach_c {
                return Ok(AbcOutcome::Separator(x));
            }
        }
        return Err(GraphError::Invariant(
            "flow below two but no separator found".into(),
        ));
    }

    let node_paths = net.decompose_paths(source, sink);
    debug_assert_eq!(node_paths.len(), 2);
    let to_vertices = |np: &Vec<usize>| -> Vec<u32> {
        let mut vs = vec![b];
        for &node in &np[1..np.len() - 1] {
            let v = (node / 2) as u32;
            if *vs.last().unwrap() != v {
                vs.push(v);
            }
        }
        vs
    };
    let p1 = to_vertices(&node_paths[0]);
    let p2 = to_vertices(&node_paths[1]);
    let (e1, e2) = (*p1.last().unwrap(), *p2.last().unwrap());

    if e1 != e2 {
        // One ends at a, the other at c.
        let (pa, pc) = if e1 == a { (&p1, &p2) } else { (&p2, &p1) };
        debug_assert_eq!(*pa.last().unwrap(), a);
        debug_assert_eq!(*pc.last().unwrap(), c);
        let mut path: Vec<u32> = pa.iter().rev().copied().collect();
        path.extend(pc.iter().skip(1));
        return Ok(AbcOutcome::Path(path));
    }

    // Both end at the same endpoint y; reroute toward the other one.
    let y = e1;
    let other = if y == a { c } else { a };
    let Some(q) = g.bfs_path(b, other, |v| v != y) else {
        return Ok(AbcOutcome::Separator(y));
    };
    let on1: BTreeSet<u32> = p1.iter().copied().collect();
    let on2: BTreeSet<u32> = p2.iter().copied().collect();
    // Viewed from the far endpoint, the first vertex of q on p1 or p2.
    let (mut split_at, mut use_p1) = (b, true);
    for &v in q.iter().rev() {
        if on1.contains(&v) || on2.contains(&v) {
            split_at = v;
            use_p1 = on1.contains(&v);
            break;
        }
    }
    let keep = if use_p1 { &p1 } else { &p2 };
    let spare = if use_p1 { &p2 } else { &p1 };
    // other --q--> split_at --keep--> b --spare--> y.
    let mut path: Vec<u32> = Vec::new();
    let qpos = q.iter().position(|&v| v == split_at).unwrap();
    for &v in q[qpos..].iter().rev() {
        path.push(v); // other first, down to split_at
    }
    let kpos = keep.iter().position(|&v| v == split_at).unwrap();
    for &v in keep[..kpos].iter().rev() {
        path.push(v); // split_at (exclusive) back to b
    }
    path.extend(spare.iter().skip(1)); // b (already present) .. y
    if y == c {
        debug_assert_eq!(path[0], a);
        Ok(AbcOutcome::Path(path))
    } else {
        path.reverse();
        debug_assert_eq!(path[0], a);
        Ok(AbcOutcome::Path(path))
    }
}

// ---------------------------------------------------------------------------
// Theta from cycle + ear
// ---------------------------------------------------------------------------

/// Assemble a theta witness from a cycle and an ear: a path whose endpoints
/// lie on the cycle and whose interior avoids it.
pub fn theta_from_cycle_and_path(
    host: &LabeledGraph,
    cycle: &Cycle,
    path: &[u32],
) -> Result<ThetaWitness, GraphError> {
    if path.len() < 2 {
        return Err(GraphError::Precondition("ear must have at least one edge".into()));
    }
    let x = path[0];
    let y = path[path.len() - 1];
    if x == y {
        return Err(GraphError::Precondition("ear endpoints coincide".into()));
    }
    if !cycle.contains_vertex(x) || !cycle.contains_vertex(y) {
        return Err(GraphError::Precondition("ear endpoints must lie on the cycle".into()));
    }
    for &v in &path[1..path.len() - 1] {
        if cycle.contains_vertex(v) {
            return Err(GraphError::Precondition(format!(
                "ear touches the cycle internally at {v}"
            )));
        }
    }
    if path.len() == 2 && cycle.contains_edge((x, y)) {
        return Err(GraphError::Precondition("ear is an edge of the cycle".into()));
    }
    let vs = cycle.vertices();
    let px = vs.iter().position(|&v| v == x).unwrap();
    let py = vs.iter().position(|&v| v == y).unwrap();
    let len = vs.len();
    // Arc walking forward from x to y, and the complementary arc.
    let mut arc1 = Vec::new();
    let mut i = px;
    loop {
        arc1.push(vs[i]);
        if i == py {
            break;
        }
        i = (i + 1) % len;
    }
    let mut arc2 = Vec::new();
    let mut i = px;
    loop {
        arc2.push(vs[i]);
        if i == py {
            break;
        }
        i = (i + len - 1) % len;
    }
    ThetaWitness::new(host, x, y, [path.to_vec(), arc1, arc2])
}

// ---------------------------------------------------------------------------
// Exact cycle enumeration
// ---------------------------------------------------------------------------

/// Closed predicate over cycles: evenness, meeting `A`, a minimum length,
/// and an optional length residue.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclePredicate {
    #[serde(default)]
    pub require_even: bool,
    #[serde(default)]
    pub require_a: bool,
    #[serde(default)]
    pub min_len: usize,
    /// `(m, r)`: cycle length must be congruent to `r` mod `m`.
    #[serde(default)]
    pub modulus: Option<(usize, usize)>,
}

impl CyclePredicate {
    pub fn even_a() -> Self {
        Self { require_even: true, require_a: true, min_len: 0, modulus: None }
    }

    pub fn matches(&self, cycle: &Cycle, a: &BTreeSet<u32>) -> bool {
        if self.require_even && !cycle.is_even() {
            return false;
        }
        if self.require_a && !cycle.meets(a) {
            return false;
        }
        if cycle.len() < self.min_len {
            return false;
        }
        if let Some((m, r)) = self.modulus {
            if m == 0 || cycle.len() % m != r {
                return false;
            }
        }
        true
    }
}

/// Enumerate all simple cycles satisfying the predicate, in canonical order
/// (length, then vertex sequence), truncated at `cap`.
///
/// Exact at desk scale: refuses graphs on more than 64 vertices unless a cap
/// is given. `max_nodes` bounds the number of search steps; exceeding it is
/// an error, never a silent truncation.
pub fn enumerate_cycles(
    g: &LabeledGraph,
    pred: &CyclePredicate,
    cap: Option<usize>,
    max_nodes: u64,
) -> Result<Vec<Cycle>, GraphError> {
    if g.n() > 64 && cap.is_none() {
        return Err(GraphError::Precondition(format!(
            "refusing uncapped enumeration on {} vertices",
            g.n()
        )));
    }
    let mut found: Vec<Cycle> = Vec::new();
    let mut nodes = 0u64;
    let n = g.n();
    let mut on_path = vec![false; n];
    // Depth-first over paths [s, v1, .., vk] with all vi > s; a cycle is
    // recorded when vk is adjacent to s and v1 < vk, which fixes the
    // orientation and counts each cycle exactly once.
    for s in 0..n as u32 {
        let mut path: Vec<u32> = vec![s];
        let mut cursors: Vec<usize> = vec![0];
        on_path[s as usize] = true;
        while !cursors.is_empty() {
            let depth = cursors.len() - 1;
            let u = path[depth];
            let nbrs = g.neighbors(u);
            let ci = cursors[depth];
            if ci >= nbrs.len() {
                cursors.pop();
                on_path[u as usize] = false;
                path.pop();
                continue;
            }
            cursors[depth] += 1;
            let w = nbrs[ci];
            nodes += 1;
            if nodes > max_nodes {
                return Err(GraphError::Precondition(
                    "cycle enumeration budget exceeded".into(),
                ));
            }
            if w == s && depth >= 2 && path[1] < path[depth] {
                let cycle = Cycle::canonical(path.clone());
                if pred.matches(&cycle, g.a_set()) {
                    found.push(cycle);
                }
                continue;
            }
            if w > s && !on_path[w as usize] {
                path.push(w);
                on_path[w as usize] = true;
                cursors.push(0);
            }
        }
        on_path[s as usize] = false;
    }
    found.sort_by(|a, b| (a.len(), a.vertices()).cmp(&(b.len(), b.vertices())));
    if let Some(cap) = cap {
        found.truncate(cap);
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_with_paths(paths: &[&[u32]]) -> LabeledGraph {
        let mut edges = BTreeSet::new();
        let mut maxv = 0;
        for p in paths {
            for w in p.windows(2) {
                edges.insert(edge(w[0], w[1]));
            }
            maxv = maxv.max(*p.iter().max().unwrap());
        }
        LabeledGraph::new(maxv as usize + 1, edges, [], None).unwrap()
    }

    /// Theta with given path lengths between branch vertices 0 and 1,
    /// interior ids assigned sequentially from 2.
    fn make_theta(lens: [usize; 3]) -> (LabeledGraph, ThetaWitness) {
        let mut next = 2u32;
        let mut paths: Vec<Vec<u32>> = Vec::new();
        for &l in &lens {
            let mut p = vec![0u32];
            for _ in 0..l - 1 {
                p.push(next);
                next += 1;
            }
            p.push(1);
            paths.push(p);
        }
        let g = graph_with_paths(&[&paths[0], &paths[1], &paths[2]]);
        let theta =
            ThetaWitness::new(&g, 0, 1, [paths[0].clone(), paths[1].clone(), paths[2].clone()])
                .unwrap();
        (g, theta)
    }

    #[test]
    fn unique_even_union_is_forced_by_parity() {
        // Lengths (1, 2, 3): only 1 + 3 is even.
        let (g, theta) = make_theta([1, 2, 3]);
        // A on paths 1 and 2 (interior vertices).
        let a: BTreeSet<u32> = [theta.paths[1][1], theta.paths[2][1]].into_iter().collect();
        let c = even_a_cycle_from_theta(&g, &theta, &a).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.is_even() && c.meets(&a));
        assert!(c.contains_vertex(theta.paths[2][1]));
    }

    #[test]
    fn equal_parities_take_the_first_pair() {
        let (g, theta) = make_theta([2, 2, 3]);
        let a: BTreeSet<u32> = [theta.paths[0][1], theta.paths[1][1]].into_iter().collect();
        let c = even_a_cycle_from_theta(&g, &theta, &a).unwrap();
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn index_tie_break_on_all_odd_lengths() {
        let (g, theta) = make_theta([3, 5, 7]);
        let a: BTreeSet<u32> = [theta.paths[1][1], theta.paths[2][1]].into_iter().collect();
        let c = even_a_cycle_from_theta(&g, &theta, &a).unwrap();
        // First even pair is (0, 1): length 8, contains the path-1 A-vertex.
        assert_eq!(c.len(), 8);
        assert!(c.contains_vertex(theta.paths[1][1]));
        assert!(c.meets(&a));
    }

    #[test]
    fn rejects_fewer_than_two_a_paths() {
        let (g, theta) = make_theta([2, 2, 2]);
        let a: BTreeSet<u32> = [theta.paths[0][1]].into_iter().collect();
        assert!(matches!(
            even_a_cycle_from_theta(&g, &theta, &a),
            Err(GraphError::Precondition(_))
        ));
    }

    #[test]
    fn extracted_cycle_is_a_subgraph_and_parity_never_fails() {
        // Fuzz over random path lengths; the union must always exist.
        let mut seed = 0x9e3779b9u64;
        for _ in 0..500 {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let l1 = 1 + (seed >> 7) as usize % 50;
            let l2 = 1 + (seed >> 17) as usize % 50;
            let l3 = 1 + (seed >> 27) as usize % 50;
            // Simplicity: at most one length-1 path.
            let mut lens = [l1.max(1), l2.max(2), l3.max(2)];
            if lens[1] == 1 {
                lens[1] = 2;
            }
            if lens[2] == 1 {
                lens[2] = 2;
            }
            let (g, theta) = make_theta(lens);
            let a: BTreeSet<u32> =
                [theta.paths[1][1], theta.paths[2][theta.paths[2].len() - 2]]
                    .into_iter()
                    .collect();
            let c = even_a_cycle_from_theta(&g, &theta, &a).unwrap();
            assert!(c.is_even());
            assert!(c.meets(&a));
            let theta_edges: BTreeSet<(u32, u32)> =
                theta.edge_sets().into_iter().flatten().collect();
            for e in c.edge_set() {
                assert!(theta_edges.contains(&e));
            }
        }
    }

    #[test]
    fn abc_on_a_triangle() {
        let g = LabeledGraph::new(3, [(0, 1), (1, 2), (0, 2)], [], None).unwrap();
        assert_eq!(abc_path(&g, 0, 1, 2).unwrap(), AbcOutcome::Path(vec![0, 1, 2]));
    }

    #[test]
    fn star_center_is_the_separator() {
        // Star with center 3 adjacent to a=0, b=1, c=2.
        let g = LabeledGraph::new(4, [(0, 3), (1, 3), (2, 3)], [], None).unwrap();
        assert_eq!(abc_path(&g, 0, 1, 2).unwrap(), AbcOutcome::Separator(3));
    }

    #[test]
    fn square_with_pendant_reroutes() {
        // C4 b-p-c-q-b plus pendant b-a: a=4, b=0, p=1, c=2, q=3.
        let g =
            LabeledGraph::new(5, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 4)], [], None).unwrap();
        match abc_path(&g, 4, 0, 2).unwrap() {
            AbcOutcome::Path(p) => {
                assert_eq!(p.first(), Some(&4));
                assert_eq!(p.last(), Some(&2));
                assert!(p.contains(&0));
                assert_eq!(p.len(), 4);
            }
            other => panic!("expected path, got {other:?}"),
        }
    }

    #[test]
    fn distinctness_is_required() {
        let g = LabeledGraph::new(3, [(0, 1), (1, 2)], [], None).unwrap();
        assert!(abc_path(&g, 0, 0, 2).is_err());
    }

    #[test]
    fn theta_from_square_plus_ear() {
        let g = graph_with_paths(&[&[0, 1, 2, 3, 0], &[0, 4, 2]]);
        let cycle = Cycle::new(&g, vec![0, 1, 2, 3]).unwrap();
        let theta = theta_from_cycle_and_path(&g, &cycle, &[0, 4, 2]).unwrap();
        let mut lens = [theta.path_len(0), theta.path_len(1), theta.path_len(2)];
        lens.sort_unstable();
        assert_eq!(lens, [2, 2, 2]);
    }

    #[test]
    fn theta_from_hexagon_plus_chord() {
        let g = graph_with_paths(&[&[0, 1, 2, 3, 4, 5, 0], &[0, 3]]);
        let cycle = Cycle::new(&g, vec![0, 1, 2, 3, 4, 5]).unwrap();
        let theta = theta_from_cycle_and_path(&g, &cycle, &[0, 3]).unwrap();
        let mut lens = [theta.path_len(0), theta.path_len(1), theta.path_len(2)];
        lens.sort_unstable();
        assert_eq!(lens, [1, 3, 3]);
    }

    #[test]
    fn ear_validation_rejects_bad_input() {
        let g = graph_with_paths(&[&[0, 1, 2, 3, 0], &[1, 4, 3], &[1, 3]]);
        let cycle = Cycle::new(&g, vec![0, 1, 2, 3]).unwrap();
        // Internal touch.
        assert!(theta_from_cycle_and_path(&g, &cycle, &[1, 4, 3, 2]).is_err());
        // Coinciding endpoints.
        assert!(theta_from_cycle_and_path(&g, &cycle, &[1, 4, 1]).is_err());
        // Chord is fine.
        assert!(theta_from_cycle_and_path(&g, &cycle, &[1, 3]).is_ok());
        // An ear that is an edge of the cycle is not.
        assert!(theta_from_cycle_and_path(&g, &cycle, &[0, 1]).is_err());
    }

    #[test]
    fn k4_has_three_even_a_cycles() {
        let g = LabeledGraph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], [0], None)
            .unwrap();
        let found =
            enumerate_cycles(&g, &CyclePredicate::even_a(), None, 1 << 20).unwrap();
        assert_eq!(found.len(), 3);
        assert!(found.iter().all(|c| c.len() == 4 && c.contains_vertex(0)));
        // All seven cycles without the filter: four triangles and three squares.
        let all = enumerate_cycles(&g, &CyclePredicate::default(), None, 1 << 20).unwrap();
        assert_eq!(all.len(), 7);
    }

    #[test]
    fn odd_girth_yields_nothing_even() {
        let g = LabeledGraph::new(3, [(0, 1), (1, 2), (0, 2)], [], None).unwrap();
        let pred = CyclePredicate { require_even: true, ..Default::default() };
        assert!(enumerate_cycles(&g, &pred, None, 1 << 20).unwrap().is_empty());
    }

    #[test]
    fn empty_a_yields_no_a_cycles() {
        let g = LabeledGraph::new(
            6,
            [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)],
            [],
            None,
        )
        .unwrap();
        let pred = CyclePredicate { require_a: true, ..Default::default() };
        assert!(enumerate_cycles(&g, &pred, None, 1 << 20).unwrap().is_empty());
    }

    #[test]
    fn modulus_predicate_filters_by_length() {
        let g = LabeledGraph::new(
            6,
            [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (0, 3)],
            [],
            None,
        )
        .unwrap();
        let pred = CyclePredicate { modulus: Some((3, 0)), ..Default::default() };
        let found = enumerate_cycles(&g, &pred, None, 1 << 20).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].len(), 6);
    }

    #[test]
    fn cap_truncates_in_canonical_order() {
        let g = LabeledGraph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], [], None)
            .unwrap();
        let short = enumerate_cycles(&g, &CyclePredicate::default(), Some(2), 1 << 20).unwrap();
        assert_eq!(short.len(), 2);
        assert!(short.iter().all(|c| c.len() == 3));
    }
}
