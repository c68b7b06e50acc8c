//! Graph surgery: edge subdivision and degree-2 suppression. Both return
//! fresh graphs plus enough id bookkeeping for callers to trace original
//! edges through the operation.

use std::collections::BTreeSet;

use crate::graph::{edge, GraphError, LabeledGraph};

/// Replace edge `e` by a path of length `t` (`t - 1` fresh vertices, ids
/// `n..n+t-1`, none in `A`). Returns the new graph and the replacing path
/// from the smaller endpoint of `e` to the larger, endpoints included.
/// `t = 1` returns the graph unchanged.
pub fn subdivide_edge(
    g: &LabeledGraph,
    e: (u32, u32),
    t: usize,
) -> Result<(LabeledGraph, Vec<u32>), GraphError> {
    let e = edge(e.0, e.1);
    if t == 0 {
        return Err(GraphError::Precondition("subdivision length must be >= 1".into()));
    }
    if !g.has_edge(e.0, e.1) {
        return Err(GraphError::NoSuchEdge(e.0, e.1));
    }
    if t == 1 {
        return Ok((g.clone(), vec![e.0, e.1]));
    }
    let n = g.n();
    let mut edges: Vec<(u32, u32)> = g.edges().iter().copied().filter(|&x| x != e).collect();
    let mut path = vec![e.0];
    for i in 0..t - 1 {
        path.push((n + i) as u32);
    }
    path.push(e.1);
    for w in path.windows(2) {
        edges.push((w[0], w[1]));
    }
    let out = LabeledGraph::new(n + t - 1, edges, g.a_set().iter().copied(), g.z())?;
    Ok((out, path))
}

/// Result of a suppression pass: the compacted graph and the old-to-new
/// vertex id map (`None` for suppressed vertices).
pub struct Suppression {
    pub graph: LabeledGraph,
    pub vertex_map: Vec<Option<u32>>,
}

impl Suppression {
    /// Translate an old edge through the suppression, if both ends survive.
    pub fn map_edge(&self, e: (u32, u32)) -> Option<(u32, u32)> {
        match (self.vertex_map[e.0 as usize], self.vertex_map[e.1 as usize]) {
            (Some(u), Some(v)) => Some(edge(u, v)),
            _ => None,
        }
    }
}

/// Repeatedly replace unprotected degree-2 vertices by an edge between their
/// neighbors, skipping any replacement that would create a loop or parallel
/// edge, until a fixpoint is reached. The hitting vertex `z`, if present, is
/// always kept; A-marks of suppressed vertices are dropped. Vertex ids are
/// compacted afterwards.
pub fn suppress_degree_two(g: &LabeledGraph, protect: &BTreeSet<u32>) -> Suppression {
    let n = g.n();
    let mut adj: Vec<BTreeSet<u32>> = (0..n as u32)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut alive = vec![true; n];

    loop {
        let mut changed = false;
        for v in 0..n as u32 {
            if !alive[v as usize]
                || protect.contains(&v)
                || g.z() == Some(v)
                || adj[v as usize].len() != 2
            {
                continue;
            }
            let mut it = adj[v as usize].iter();
            let &u = it.next().unwrap();
            let &w = it.next().unwrap();
            if adj[u as usize].contains(&w) {
                continue; // replacement would create a parallel edge
            }
            adj[u as usize].remove(&v);
            adj[w as usize].remove(&v);
            adj[u as usize].insert(w);
            adj[w as usize].insert(u);
            adj[v as usize].clear();
            alive[v as usize] = false;
            changed = true;
        }
        if !changed {
            break;
        }
    }

    let mut vertex_map = vec![None; n];
    let mut next = 0u32;
    for v in 0..n {
        if alive[v] {
            vertex_map[v] = Some(next);
            next += 1;
        }
    }
    let mut edges = Vec::new();
    for v in 0..n as u32 {
        if !alive[v as usize] {
            continue;
        }
        for &w in &adj[v as usize] {
            if v < w {
                edges.push((vertex_map[v as usize].unwrap(), vertex_map[w as usize].unwrap()));
            }
        }
    }
    let a = g
        .a_set()
        .iter()
        .filter_map(|&v| vertex_map[v as usize]);
    let z = g.z().and_then(|v| vertex_map[v as usize]);
    let graph = LabeledGraph::new(next as usize, edges, a, z).expect("suppression stays simple");
    Suppression { graph, vertex_map }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_subdivision_is_identity() {
        let g = LabeledGraph::new(3, [(0, 1), (1, 2), (0, 2)], [0], None).unwrap();
        let (h, path) = subdivide_edge(&g, (1, 0), 1).unwrap();
        assert_eq!(h, g);
        assert_eq!(path, vec![0, 1]);
    }

    #[test]
    fn subdividing_a_triangle_edge_gives_a_square() {
        let g = LabeledGraph::new(3, [(0, 1), (1, 2), (0, 2)], [], None).unwrap();
        let (h, path) = subdivide_edge(&g, (0, 1), 2).unwrap();
        assert_eq!(h.n(), 4);
        assert_eq!(path, vec![0, 3, 1]);
        assert!(h.has_edge(0, 3) && h.has_edge(3, 1) && !h.has_edge(0, 1));
        assert!(!h.is_a(3));
    }

    #[test]
    fn subdividing_every_square_edge_scales_the_cycle() {
        let m = 5usize;
        let mut g = LabeledGraph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)], [], None).unwrap();
        for e in [(0u32, 1u32), (1, 2), (2, 3), (0, 3)] {
            let (h, _) = subdivide_edge(&g, e, m).unwrap();
            g = h;
        }
        assert_eq!(g.edge_count(), 4 * m);
        assert_eq!(g.n(), 4 + 4 * (m - 1));
        assert!(g.vertices().all(|v| g.degree(v) == 2));
        assert!(g.is_connected());
    }

    #[test]
    fn missing_edge_is_an_error() {
        let g = LabeledGraph::new(3, [(0, 1)], [], None).unwrap();
        assert!(matches!(subdivide_edge(&g, (1, 2), 2), Err(GraphError::NoSuchEdge(1, 2))));
    }

    #[test]
    fn suppresses_a_path_to_an_edge() {
        let g = LabeledGraph::new(3, [(0, 1), (1, 2)], [], None).unwrap();
        let protect: BTreeSet<u32> = [0, 2].into_iter().collect();
        let s = suppress_degree_two(&g, &protect);
        assert_eq!(s.graph.n(), 2);
        assert_eq!(s.graph.edges(), &[(0, 1)]);
        assert_eq!(s.vertex_map, vec![Some(0), None, Some(1)]);
    }

    #[test]
    fn triangle_is_untouched_by_the_simplicity_guard() {
        let g = LabeledGraph::new(3, [(0, 1), (1, 2), (0, 2)], [], None).unwrap();
        let s = suppress_degree_two(&g, &BTreeSet::new());
        assert_eq!(s.graph, g);
    }

    #[test]
    fn chains_collapse_and_marks_survive() {
        // 0 - 1 - 2 - 3 - 4 with A = {0, 2} and 2 protected.
        let g = LabeledGraph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4)], [0, 2], None).unwrap();
        let protect: BTreeSet<u32> = [0, 2, 4].into_iter().collect();
        let s = suppress_degree_two(&g, &protect);
        assert_eq!(s.graph.n(), 3);
        assert_eq!(s.graph.edges(), &[(0, 1), (1, 2)]);
        assert!(s.graph.is_a(0) && s.graph.is_a(1));
        // Unprotected A-vertices may be suppressed.
        let s2 = suppress_degree_two(&g, &[0, 4].into_iter().collect());
        assert_eq!(s2.graph.n(), 2);
        assert!(s2.graph.a_set().is_empty() || s2.graph.is_a(0));
    }
}
