//! Labeled graphs, the line-oriented graph file format, and cycles.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid graph: {0}")]
    Invariant(String),
    #[error("graph is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("no such edge ({0}, {1})")]
    NoSuchEdge(u32, u32),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Simple undirected graph on dense vertex ids `0..n` with a distinguished
/// vertex set `A` and an optional hitting vertex `z`.
///
/// Values are immutable after construction; all operations that modify a
/// graph return a fresh one. Edges are stored with the smaller endpoint
/// first and the edge list sorted, so two equal graphs compare equal.
#[derive(Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    n: usize,
    edges: Vec<(u32, u32)>,
    adj: Vec<Vec<u32>>,
    a: BTreeSet<u32>,
    z: Option<u32>,
}

impl LabeledGraph {
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
        a: impl IntoIterator<Item = u32>,
        z: Option<u32>,
    ) -> Result<Self, GraphError> {
        let mut canon: Vec<(u32, u32)> = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::Invariant(format!("loop at vertex {u}")));
            }
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::Invariant(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if canon.windows(2).any(|w| w[0] == w[1]) {
            return Err(GraphError::Invariant("parallel edge".into()));
        }
        let a: BTreeSet<u32> = a.into_iter().collect();
        if let Some(&hi) = a.iter().next_back() {
            if hi as usize >= n {
                return Err(GraphError::Invariant(format!("A-vertex {hi} out of range")));
            }
        }
        if let Some(zv) = z {
            if zv as usize >= n {
                return Err(GraphError::Invariant(format!("z-vertex {zv} out of range")));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &canon {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        Ok(Self { n, edges: canon, adj, a, z })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical form: smaller endpoint first, sorted.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn a_set(&self) -> &BTreeSet<u32> {
        &self.a
    }

    pub fn is_a(&self, v: u32) -> bool {
        self.a.contains(&v)
    }

    pub fn z(&self) -> Option<u32> {
        self.z
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> {
        0..self.n as u32
    }

    /// Same vertex ids, with the given edges removed.
    pub fn without_edges(&self, remove: &BTreeSet<(u32, u32)>) -> LabeledGraph {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|e| !remove.contains(e))
            .collect::<Vec<_>>();
        LabeledGraph::new(self.n, edges, self.a.iter().copied(), self.z)
            .expect("edge filtering preserves validity")
    }

    /// Same vertex ids, with `v` isolated and all its marks dropped.
    pub fn without_vertex(&self, v: u32) -> LabeledGraph {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(x, y)| x != v && y != v)
            .collect::<Vec<_>>();
        let a = self.a.iter().copied().filter(|&x| x != v);
        let z = self.z.filter(|&x| x != v);
        LabeledGraph::new(self.n, edges, a, z).expect("vertex removal preserves validity")
    }

    /// Replace the A-set, keeping everything else.
    pub fn with_a(&self, a: impl IntoIterator<Item = u32>) -> Result<LabeledGraph, GraphError> {
        LabeledGraph::new(self.n, self.edges.iter().copied(), a, self.z)
    }

    /// Replace the hitting mark, keeping everything else.
    pub fn with_z(&self, z: Option<u32>) -> Result<LabeledGraph, GraphError> {
        LabeledGraph::new(self.n, self.edges.iter().copied(), self.a.iter().copied(), z)
    }

    /// Connected components as sorted vertex lists, sorted by minimum vertex.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s as u32];
            seen[s] = true;
            let mut stack = vec![s as u32];
            while let Some(u) = stack.pop() {
                for &w in self.neighbors(u) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// Shortest path between `from` and `to` over vertices satisfying
    /// `allowed` (both endpoints must satisfy it). Deterministic: BFS with
    /// sorted neighbor lists.
    pub fn bfs_path(
        &self,
        from: u32,
        to: u32,
        allowed: impl Fn(u32) -> bool,
    ) -> Option<Vec<u32>> {
        if !allowed(from) || !allowed(to) {
            return None;
        }
        if from == to {
            return Some(vec![from]);
        }
        let mut prev = vec![u32::MAX; self.n];
        prev[from as usize] = from;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(from);
        while let Some(u) = queue.pop_front() {
            for &w in self.neighbors(u) {
                if prev[w as usize] == u32::MAX && allowed(w) {
                    prev[w as usize] = u;
                    if w == to {
                        let mut path = vec![to];
                        let mut cur = to;
                        while cur != from {
                            cur = prev[cur as usize];
                            path.push(cur);
                        }
                        path.reverse();
                        return Some(path);
                    }
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

impl fmt::Debug for LabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "LabeledGraph(n={}, m={}, A={:?}, z={:?})",
            self.n,
            self.edges.len(),
            self.a,
            self.z
        )
    }
}

/// Canonical edge form: smaller endpoint first.
pub fn edge(u: u32, v: u32) -> (u32, u32) {
    (u.min(v), u.max(v))
}

// ---------------------------------------------------------------------------
// Graph file format
// ---------------------------------------------------------------------------

/// Parse the line-oriented graph format.
///
/// `#` starts a comment; the header `p <n> <m>` must come first, followed by
/// `e <u> <v>` edge lines, `a <v>` marks and at most one `z <v>` mark.
pub fn parse_graph(text: &str) -> Result<LabeledGraph, GraphError> {
    let mut n: Option<usize> = None;
    let mut m: usize = 0;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut a: BTreeSet<u32> = BTreeSet::new();
    let mut z: Option<u32> = None;

    let err = |line: usize, msg: String| GraphError::Parse { line, msg };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let mut it = line.split_whitespace();
        let Some(tag) = it.next() else { continue };
        let mut num = |what: &str| -> Result<u32, GraphError> {
            it.next()
                .ok_or_else(|| err(line_no, format!("missing {what}")))?
                .parse::<u32>()
                .map_err(|_| err(line_no, format!("bad {what}")))
        };
        match tag {
            "p" => {
                if n.is_some() {
                    return Err(err(line_no, "duplicate header".into()));
                }
                n = Some(num("vertex count")? as usize);
                m = num("edge count")? as usize;
            }
            "e" => {
                let n = n.ok_or_else(|| err(line_no, "edge before header".into()))?;
                let u = num("endpoint")?;
                let v = num("endpoint")?;
                if u == v {
                    return Err(err(line_no, format!("loop at vertex {u}")));
                }
                if u as usize >= n || v as usize >= n {
                    return Err(err(line_no, format!("vertex id out of range: ({u}, {v})")));
                }
                let e = edge(u, v);
                if edges.contains(&e) {
                    return Err(err(line_no, format!("duplicate edge ({}, {})", e.0, e.1)));
                }
                edges.push(e);
            }
            "a" => {
                let n = n.ok_or_else(|| err(line_no, "mark before header".into()))?;
                let v = num("vertex")?;
                if v as usize >= n {
                    return Err(err(line_no, format!("A-vertex {v} out of range")));
                }
                a.insert(v);
            }
            "z" => {
                let n = n.ok_or_else(|| err(line_no, "mark before header".into()))?;
                if z.is_some() {
                    return Err(err(line_no, "multiple z lines".into()));
                }
                let v = num("vertex")?;
                if v as usize >= n {
                    return Err(err(line_no, format!("z-vertex {v} out of range")));
                }
                z = Some(v);
            }
            other => return Err(err(line_no, format!("unknown line tag '{other}'"))),
        }
    }
    let n = n.ok_or_else(|| err(0, "missing header".into()))?;
    if edges.len() != m {
        return Err(GraphError::Parse {
            line: 0,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    LabeledGraph::new(n, edges, a, z)
}

/// Serialize in canonical form: header, sorted edges, sorted A-marks, z-mark.
pub fn serialize_graph(g: &LabeledGraph) -> String {
    let mut out = String::new();
    out.push_str(&format!("p {} {}\n", g.n(), g.edge_count()));
    for &(u, v) in g.edges() {
        out.push_str(&format!("e {u} {v}\n"));
    }
    for &v in g.a_set() {
        out.push_str(&format!("a {v}\n"));
    }
    if let Some(z) = g.z() {
        out.push_str(&format!("z {z}\n"));
    }
    out
}

// ---------------------------------------------------------------------------
// Cycles
// ---------------------------------------------------------------------------

/// A simple cycle in canonical form: the vertex list is rotated so the
/// minimum vertex comes first and oriented toward its smaller neighbor.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cycle(Vec<u32>);

impl Cycle {
    /// Canonicalize and validate against a host graph.
    pub fn new(host: &LabeledGraph, vertices: Vec<u32>) -> Result<Cycle, GraphError> {
        if vertices.len() < 3 {
            return Err(GraphError::Invariant(format!(
                "cycle too short: {} vertices",
                vertices.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for &v in &vertices {
            if v as usize >= host.n() {
                return Err(GraphError::Invariant(format!("cycle vertex {v} out of range")));
            }
            if !seen.insert(v) {
                return Err(GraphError::Invariant(format!("repeated cycle vertex {v}")));
            }
        }
        for i in 0..vertices.len() {
            let u = vertices[i];
            let v = vertices[(i + 1) % vertices.len()];
            if !host.has_edge(u, v) {
                return Err(GraphError::NoSuchEdge(u, v));
            }
        }
        Ok(Self::canonical(vertices))
    }

    /// Canonical rotation without validation.
    pub fn canonical(vertices: Vec<u32>) -> Cycle {
        let len = vertices.len();
        let pos = vertices
            .iter()
            .enumerate()
            .min_by_key(|&(_, &v)| v)
            .map(|(i, _)| i)
            .unwrap();
        let fwd = vertices[(pos + 1) % len];
        let bwd = vertices[(pos + len - 1) % len];
        let mut out = Vec::with_capacity(len);
        if fwd <= bwd {
            for i in 0..len {
                out.push(vertices[(pos + i) % len]);
            }
        } else {
            for i in 0..len {
                out.push(vertices[(pos + len - i) % len]);
            }
        }
        Cycle(out)
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_even(&self) -> bool {
        self.0.len() % 2 == 0
    }

    pub fn meets(&self, set: &BTreeSet<u32>) -> bool {
        self.0.iter().any(|v| set.contains(v))
    }

    pub fn contains_vertex(&self, v: u32) -> bool {
        self.0.contains(&v)
    }

    /// Edges in canonical pair form.
    pub fn edge_set(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = (0..self.0.len())
            .map(|i| edge(self.0[i], self.0[(i + 1) % self.0.len()]))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn contains_edge(&self, e: (u32, u32)) -> bool {
        let e = edge(e.0, e.1);
        (0..self.0.len()).any(|i| edge(self.0[i], self.0[(i + 1) % self.0.len()]) == e)
    }
}

impl fmt::Debug for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cycle{:?}", self.0)
    }
}

impl serde::Serialize for Cycle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for Cycle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<u32>::deserialize(d)?;
        if v.len() < 3 {
            return Err(serde::de::Error::custom("cycle too short"));
        }
        Ok(Cycle::canonical(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> LabeledGraph {
        LabeledGraph::new(3, [(0, 1), (1, 2), (0, 2)], [0], None).unwrap()
    }

    #[test]
    fn parses_triangle_with_mark() {
        let g = parse_graph("p 3 3\ne 0 1\ne 1 2\ne 0 2\na 0\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
        assert!(g.is_a(0) && !g.is_a(1));
        assert_eq!(g.z(), None);
    }

    #[test]
    fn rejects_loop_with_line_number() {
        let err = parse_graph("p 2 1\ne 0 0\n").unwrap_err();
        match err {
            GraphError::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("loop"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicate_edge_and_double_z() {
        assert!(parse_graph("p 3 2\ne 0 1\ne 1 0\n").is_err());
        assert!(parse_graph("p 3 1\ne 0 1\nz 0\nz 1\n").is_err());
        assert!(parse_graph("p 3 1\ne 0 5\n").is_err());
    }

    #[test]
    fn serialization_is_canonical() {
        let g = parse_graph("p 4 3\ne 2 1\ne 0 3\ne 3 1\na 2\na 0\nz 3\n").unwrap();
        let s = serialize_graph(&g);
        assert_eq!(s, "p 4 3\ne 0 3\ne 1 2\ne 1 3\na 0\na 2\nz 3\n");
        let g2 = parse_graph(&s).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn cycle_canonical_rotation_picks_smaller_neighbor() {
        let g = LabeledGraph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)], [], None).unwrap();
        let c1 = Cycle::new(&g, vec![2, 3, 0, 1]).unwrap();
        let c2 = Cycle::new(&g, vec![3, 2, 1, 0]).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(c1.vertices(), &[0, 1, 2, 3]);
    }

    #[test]
    fn cycle_rejects_non_edges_and_repeats() {
        let g = triangle();
        assert!(Cycle::new(&g, vec![0, 1, 2]).is_ok());
        assert!(Cycle::new(&g, vec![0, 1, 1]).is_err());
        let g2 = LabeledGraph::new(4, [(0, 1), (1, 2), (2, 3)], [], None).unwrap();
        assert!(Cycle::new(&g2, vec![0, 1, 2, 3]).is_err());
    }

    #[test]
    fn vertex_and_edge_removal_keep_ids_stable() {
        let g = triangle().with_z(Some(2)).unwrap();
        let h = g.without_vertex(2);
        assert_eq!(h.n(), 3);
        assert_eq!(h.edges(), &[(0, 1)]);
        assert_eq!(h.z(), None);
        let mut rm = BTreeSet::new();
        rm.insert((0, 1));
        let h2 = g.without_edges(&rm);
        assert_eq!(h2.edges(), &[(0, 2), (1, 2)]);
        assert_eq!(h2.z(), Some(2));
    }
}
