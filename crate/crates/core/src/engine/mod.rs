//! The packing-vs-covering engine. Given a graph whose even A-cycles are all
//! met by one vertex `z`, `solve_single_z` constructively produces either
//! `k` edge-disjoint even A-cycles or an edge set of at most `1080 k^5`
//! edges meeting every even A-cycle. `solve_general` is the oracle-assisted
//! driver for arbitrary inputs.

mod extract;
mod pipeline;

pub use pipeline::{BlockHit, Pipeline, StringHit, StringPath};

use std::collections::BTreeSet;

use thiserror::Error;

use crate::blocks::{block_tree, BlockTree};
use crate::certificate::{Certificate, Provenance};
use crate::cycles::{enumerate_cycles, even_a_cycle_from_theta, CyclePredicate, ThetaWitness};
use crate::graph::{Cycle, GraphError, LabeledGraph};
use crate::oracle::{
    max_edge_disjoint_packing, min_edge_hitting_set, min_vertex_hitting_set, OracleBudget,
    OracleError,
};
use crate::trees::{subtrees_meeting_z, Tree};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("single hitting vertex assumption violated: even A-cycle avoiding z")]
    SingleZViolation { cycle: Cycle },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Whether the single-hitting-vertex assumption is re-checked by cycle
/// enumeration before the pipeline runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    Checked,
    Trusted,
}

/// Per-run audit trail: which branches fired and the per-lemma cover sizes.
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct SolveReport {
    pub mode: String,
    pub branch: Vec<String>,
    /// Sizes of the per-block covers that went into the final edge set.
    pub block_cover_sizes: Vec<usize>,
    /// Sizes of the per-string covers.
    pub string_cover_sizes: Vec<usize>,
    /// Strings plus unstrung A-blocks, against the packing threshold.
    pub cover_units: usize,
    pub packing_threshold: u64,
    pub bound_claimed: u64,
}

impl SolveReport {
    fn note(&mut self, line: impl Into<String>) {
        self.branch.push(line.into());
    }
}

pub struct SolveOutput {
    pub certificate: Certificate,
    pub report: SolveReport,
}

/// The hitting-set size bound the engine guarantees in single-z mode.
pub fn single_z_bound(k: usize) -> u64 {
    1080u64 * (k as u64).pow(5)
}

fn even_a_cycles_avoiding(
    g: &LabeledGraph,
    z: u32,
    budget: &OracleBudget,
) -> Result<Option<Cycle>, EngineError> {
    let rest = g.without_vertex(z).with_a(g.a_set().iter().copied().filter(|&a| a != z))?;
    let found = enumerate_cycles(&rest, &CyclePredicate::even_a(), Some(1), budget.max_nodes)
        .map_err(|e| OracleError::Budget(e.to_string()))?;
    Ok(found.into_iter().next())
}

// ---------------------------------------------------------------------------
// The z-in-A case
// ---------------------------------------------------------------------------

/// When the hitting vertex itself is labeled: either its degree is below
/// `4k` and its incident edges form the cover, or `k` edge-disjoint even
/// cycles through it are assembled from a spanning tree of the subdivided
/// neighborhood.
pub fn handle_z_in_a(g: &LabeledGraph, k: usize) -> Result<Certificate, EngineError> {
    let z = g.z().ok_or_else(|| EngineError::Precondition("no z mark".into()))?;
    if !g.is_a(z) {
        return Err(EngineError::Precondition("z is not in A".into()));
    }
    let deg = g.degree(z);
    if deg < 4 * k {
        let edges: Vec<(u32, u32)> =
            g.neighbors(z).iter().map(|&w| crate::graph::edge(z, w)).collect();
        let provenance = vec![Provenance::ZIncident; edges.len()];
        return Ok(Certificate::HittingSet {
            k,
            edges,
            provenance,
            bound_claimed: 4 * k as u64,
        });
    }

    // Subdivide every z-edge once; the new vertices are leaves of z's
    // removal, and a spanning tree two-colors them by depth.
    let n = g.n();
    let z_nbrs: Vec<u32> = g.neighbors(z).to_vec();
    let mut edges: Vec<(u32, u32)> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| a != z && b != z)
        .collect();
    let mut mid_of = std::collections::BTreeMap::new();
    for (i, &w) in z_nbrs.iter().enumerate() {
        let mid = (n + i) as u32;
        mid_of.insert(mid, w);
        edges.push((mid, w));
    }
    let aux = LabeledGraph::new(n + z_nbrs.len(), edges, [], None)?;
    if !{
        let mut comps = aux.components();
        comps.retain(|c| c.len() > 1 || c[0] != z);
        comps.len() == 1
    } {
        return Err(EngineError::Internal(
            "neighborhood of z splits apart without it".into(),
        ));
    }
    // BFS spanning tree from the smallest non-z vertex; colors by depth.
    let root = (0..aux.n() as u32).find(|&v| v != z && aux.degree(v) > 0).unwrap();
    let mut parent = vec![u32::MAX; aux.n()];
    let mut depth = vec![0usize; aux.n()];
    parent[root as usize] = root;
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(root);
    let mut tree_edges = Vec::new();
    while let Some(u) = queue.pop_front() {
        for &w in aux.neighbors(u) {
            if w != z && parent[w as usize] == u32::MAX {
                parent[w as usize] = u;
                depth[w as usize] = depth[u as usize] + 1;
                tree_edges.push((u.min(w), u.max(w)));
                queue.push_back(w);
            }
        }
    }
    // Densify tree ids.
    let tree_vs: Vec<u32> = (0..aux.n() as u32)
        .filter(|&v| parent[v as usize] != u32::MAX)
        .collect();
    let to_dense: std::collections::BTreeMap<u32, u32> =
        tree_vs.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let dense_edges: Vec<(u32, u32)> =
        tree_edges.iter().map(|&(a, b)| (to_dense[&a], to_dense[&b])).collect();
    let tree = Tree::new(tree_vs.len(), dense_edges)?;

    // Majority depth-parity class among the subdivision vertices.
    let mids: Vec<u32> = mid_of.keys().copied().collect();
    let even_class: Vec<u32> =
        mids.iter().copied().filter(|&m| depth[m as usize] % 2 == 0).collect();
    let odd_class: Vec<u32> =
        mids.iter().copied().filter(|&m| depth[m as usize] % 2 == 1).collect();
    let class = if even_class.len() >= odd_class.len() { even_class } else { odd_class };
    if class.len() < 2 * k {
        return Err(EngineError::Internal(format!(
            "only {} same-parity attachment vertices for 2k = {}",
            class.len(),
            2 * k
        )));
    }
    let marks: BTreeSet<u32> = class.iter().map(|&m| to_dense[&m]).collect();
    let pieces = subtrees_meeting_z(&tree, &marks, 2);
    if pieces.len() < k {
        return Err(EngineError::Internal(format!(
            "{} even-parity tree pieces for k = {k}",
            pieces.len()
        )));
    }
    let mut cycles = Vec::new();
    for piece in pieces.iter().take(k) {
        let ms: Vec<u32> =
            piece.vertices.iter().copied().filter(|v| marks.contains(v)).collect();
        let (p, q) = (ms[0], ms[1]);
        let dense_path = tree.path_between(p, q);
        // Map back: endpoints are subdivision vertices, interior is real.
        let mut vs = vec![z];
        for &dv in &dense_path[1..dense_path.len() - 1] {
            vs.push(tree_vs[dv as usize]);
        }
        // Endpoints become the z-edges of the original graph.
        let first = tree_vs[dense_path[0] as usize];
        let last = tree_vs[dense_path[dense_path.len() - 1] as usize];
        debug_assert!(mid_of.contains_key(&first) && mid_of.contains_key(&last));
        let cycle = Cycle::new(g, vs)?;
        if !cycle.is_even() {
            return Err(EngineError::Internal("parity class produced an odd cycle".into()));
        }
        cycles.push(cycle);
    }
    // Edge-disjointness re-checked by the caller's verifier; assert here in
    // debug builds.
    #[cfg(debug_assertions)]
    {
        let mut used = BTreeSet::new();
        for c in &cycles {
            for e in c.edge_set() {
                assert!(used.insert(e), "handle_z_in_a produced overlapping cycles");
            }
        }
    }
    Ok(Certificate::Packing { k, cycles, bound_claimed: k as u64 })
}

// ---------------------------------------------------------------------------
// Block degree check
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum BlockDegreeOutcome {
    Ok,
    /// A labeled vertex with three neighbors inside a block of `g - z`
    /// yields a theta and hence an even A-cycle avoiding `z`.
    Violation { theta: ThetaWitness, cycle: Cycle },
}

/// Every labeled vertex must have at most two neighbors inside its blocks of
/// `g - z`; a third neighbor contradicts the single hitting vertex.
pub fn check_block_degree(g: &LabeledGraph) -> Result<BlockDegreeOutcome, EngineError> {
    let z = g.z().ok_or_else(|| EngineError::Precondition("no z mark".into()))?;
    let bt = block_tree_of_z_component(g, z)?;
    for block in &bt.blocks {
        for &a in &block.vertices {
            if !g.is_a(a) || a == z {
                continue;
            }
            let nbrs: Vec<u32> = block
                .edges
                .iter()
                .filter_map(|&(x, y)| {
                    if x == a {
                        Some(y)
                    } else if y == a {
                        Some(x)
                    } else {
                        None
                    }
                })
                .collect();
            if nbrs.len() < 3 {
                continue;
            }
            // Steiner tree of three neighbors inside the block minus a.
            let bg = LabeledGraph::new(
                g.n(),
                block.edges.iter().copied().filter(|&(x, y)| x != a && y != a),
                [],
                None,
            )?;
            let (b1, b2, b3) = (nbrs[0], nbrs[1], nbrs[2]);
            let p12 = bg
                .bfs_path(b1, b2, |_| true)
                .ok_or_else(|| EngineError::Internal("block fell apart without a".into()))?;
            // Attach b3 to the nearest vertex of that path.
            let on_path: BTreeSet<u32> = p12.iter().copied().collect();
            let attach = bg
                .bfs_path(b3, b1, |_| true)
                .ok_or_else(|| EngineError::Internal("block fell apart without a".into()))?;
            let hit = attach.iter().position(|v| on_path.contains(v)).unwrap();
            let p3 = &attach[..=hit];
            let w = attach[hit];
            // Three paths from a to w, through b1, b2, b3 respectively.
            let pos_w = p12.iter().position(|&v| v == w).unwrap();
            let mut path1 = vec![a];
            path1.extend(p12[..=pos_w].iter().copied());
            let mut path2 = vec![a];
            path2.extend(p12[pos_w..].iter().rev().copied());
            let mut path3 = vec![a];
            path3.extend(p3.iter().copied());
            let theta = ThetaWitness::new(g, a, w, [path1, path2, path3])?;
            let cycle = even_a_cycle_from_theta(g, &theta, g.a_set())?;
            debug_assert!(!cycle.contains_vertex(z));
            return Ok(BlockDegreeOutcome::Violation { theta, cycle });
        }
    }
    Ok(BlockDegreeOutcome::Ok)
}

/// Block tree of the component of `g - z` containing z's neighbors (the
/// rest of the graph cannot carry even A-cycles when the single-z
/// assumption holds). Vertex ids are the host's.
pub(crate) fn block_tree_of_z_component(
    g: &LabeledGraph,
    z: u32,
) -> Result<BlockTree, EngineError> {
    let comps = g.without_vertex(z).components();
    // Component holding z's smallest neighbor; a z without neighbors has no
    // cycles through it at all.
    let Some(&w0) = g.neighbors(z).first() else {
        return Ok(BlockTree {
            blocks: Vec::new(),
            cutvertices: Vec::new(),
            block_cuts: Vec::new(),
            cut_blocks: Default::default(),
        });
    };
    let comp = comps
        .iter()
        .find(|c| c.binary_search(&w0).is_ok())
        .expect("neighbor component exists");
    let keep: BTreeSet<u32> = comp.iter().copied().collect();
    let to_dense: std::collections::BTreeMap<u32, u32> =
        comp.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let dense_edges: Vec<(u32, u32)> = g
        .edges()
        .iter()
        .filter(|&&(x, y)| keep.contains(&x) && keep.contains(&y))
        .map(|&(x, y)| (to_dense[&x], to_dense[&y]))
        .collect();
    let dense = LabeledGraph::new(comp.len(), dense_edges, [], None)?;
    let bt = block_tree(&dense, None)?;
    // Translate back to host ids.
    let back = |v: u32| comp[v as usize];
    let blocks = bt
        .blocks
        .into_iter()
        .map(|b| crate::blocks::Block {
            vertices: {
                let mut vs: Vec<u32> = b.vertices.iter().map(|&v| back(v)).collect();
                vs.sort_unstable();
                vs
            },
            edges: {
                let mut es: Vec<(u32, u32)> = b
                    .edges
                    .iter()
                    .map(|&(x, y)| crate::graph::edge(back(x), back(y)))
                    .collect();
                es.sort_unstable();
                es
            },
        })
        .collect::<Vec<_>>();
    let mut blocks = blocks;
    blocks.sort_by(|a, b| (&a.vertices, &a.edges).cmp(&(&b.vertices, &b.edges)));
    let mut in_blocks: std::collections::BTreeMap<u32, Vec<usize>> = Default::default();
    for (i, b) in blocks.iter().enumerate() {
        for &v in &b.vertices {
            in_blocks.entry(v).or_default().push(i);
        }
    }
    let cut_blocks: std::collections::BTreeMap<u32, Vec<usize>> =
        in_blocks.into_iter().filter(|(_, bs)| bs.len() >= 2).collect();
    let cutvertices: Vec<u32> = cut_blocks.keys().copied().collect();
    let block_cuts: Vec<Vec<u32>> = blocks
        .iter()
        .map(|b| {
            b.vertices.iter().copied().filter(|v| cut_blocks.contains_key(v)).collect()
        })
        .collect();
    Ok(BlockTree { blocks, cutvertices, block_cuts, cut_blocks })
}

// ---------------------------------------------------------------------------
// Drivers
// ---------------------------------------------------------------------------

/// Solve under the single hitting vertex assumption. The graph need not be
/// 2-connected: every even A-cycle lies in a block containing `z`, so the
/// engine runs per such block and combines: partial packings merge across
/// blocks; otherwise each block contributes a cover at its own packing
/// number plus one, which keeps the total within the single-z bound.
pub fn solve_single_z(
    g: &LabeledGraph,
    k: usize,
    mode: SolveMode,
    budget: &OracleBudget,
) -> Result<SolveOutput, EngineError> {
    let z = g.z().ok_or_else(|| EngineError::Precondition("no z mark".into()))?;
    if k < 2 {
        return Err(EngineError::Precondition("single-z engine needs k >= 2".into()));
    }
    let mut report = SolveReport {
        mode: "single-z".into(),
        packing_threshold: 45 * (k as u64).pow(3),
        bound_claimed: single_z_bound(k),
        ..Default::default()
    };
    if mode == SolveMode::Checked {
        if let Some(cycle) = even_a_cycles_avoiding(g, z, budget)? {
            return Err(EngineError::SingleZViolation { cycle });
        }
        report.note("assumption check: no even A-cycle avoids z");
    } else {
        report.note("assumption check skipped (trusted)");
    }

    // Blocks of g containing z, computed on z's component.
    let comps = g.components();
    let comp = comps
        .iter()
        .find(|c| c.binary_search(&z).is_ok())
        .expect("z exists")
        .clone();
    let keep: BTreeSet<u32> = comp.iter().copied().collect();
    let to_dense: std::collections::BTreeMap<u32, u32> =
        comp.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let dense_edges: Vec<(u32, u32)> = g
        .edges()
        .iter()
        .filter(|&&(x, y)| keep.contains(&x) && keep.contains(&y))
        .map(|&(x, y)| (to_dense[&x], to_dense[&y]))
        .collect();
    let dense = LabeledGraph::new(comp.len(), dense_edges, [], None)?;
    let bt = block_tree(&dense, None)?;
    let back = |v: u32| comp[v as usize];

    let mut partial: Vec<Cycle> = Vec::new();
    let mut per_block: Vec<(LabeledGraph, usize)> = Vec::new(); // block graph, packing
    for block in &bt.blocks {
        let vertices: Vec<u32> = block.vertices.iter().map(|&v| back(v)).collect();
        if !vertices.contains(&z) {
            continue;
        }
        let edges: Vec<(u32, u32)> = block
            .edges
            .iter()
            .map(|&(x, y)| crate::graph::edge(back(x), back(y)))
            .collect();
        let a = vertices.iter().copied().filter(|&v| g.is_a(v));
        let bg = LabeledGraph::new(g.n(), edges, a, Some(z))?;
        let pack = max_edge_disjoint_packing(&bg, &CyclePredicate::even_a(), Some(k), budget)?;
        if pack.count > 0 {
            report.note(format!(
                "block with {} vertices around z packs {} (capped at k)",
                vertices.len(),
                pack.count
            ));
        }
        partial.extend(pack.cycles.iter().cloned());
        if partial.len() >= k {
            partial.truncate(k);
            report.note("packing assembled across the blocks at z");
            let certificate =
                Certificate::Packing { k, cycles: partial, bound_claimed: k as u64 };
            return Ok(SolveOutput { certificate, report });
        }
        per_block.push((bg, pack.count));
    }

    // No combined packing of size k: cover each block at its own level.
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut provenance: Vec<Provenance> = Vec::new();
    let mut seen: BTreeSet<(u32, u32)> = BTreeSet::new();
    for (bg, count) in per_block {
        if count == 0 {
            continue; // no even A-cycles in this block at all
        }
        let sub_k = (count + 1).max(2);
        let mut pipeline = Pipeline::new(&bg, sub_k)?;
        let cert = pipeline.solve(&mut report, budget)?;
        match cert {
            Certificate::Packing { .. } => {
                return Err(EngineError::Internal(
                    "pipeline packed beyond the oracle packing number".into(),
                ));
            }
            Certificate::HittingSet { edges: es, provenance: ps, .. } => {
                for (e, p) in es.into_iter().zip(ps) {
                    if seen.insert(e) {
                        edges.push(e);
                        provenance.push(p);
                    }
                }
            }
        }
    }
    let bound = single_z_bound(k);
    if (edges.len() as u64) > bound {
        return Err(EngineError::Internal(format!(
            "cover of {} edges exceeds the guaranteed bound {bound}",
            edges.len()
        )));
    }
    report.note(format!("cover assembled: {} edges against bound {bound}", edges.len()));
    let certificate =
        Certificate::HittingSet { k, edges, provenance, bound_claimed: bound };
    Ok(SolveOutput { certificate, report })
}

/// General-mode driver: try the exact packing oracle; with no packing, find
/// a minimum vertex hitting set, and when it is a single vertex run the
/// constructive engine; otherwise fall back to the exact edge oracle.
pub fn solve_general(
    g: &LabeledGraph,
    k: usize,
    budget: &OracleBudget,
) -> Result<SolveOutput, EngineError> {
    if k < 1 {
        return Err(EngineError::Precondition("k must be positive".into()));
    }
    let mut report = SolveReport {
        mode: "general".into(),
        packing_threshold: 45 * (k as u64).pow(3),
        ..Default::default()
    };
    let pack = max_edge_disjoint_packing(g, &CyclePredicate::even_a(), Some(k), budget)?;
    if pack.count >= k {
        report.note(format!("oracle packs {k} even A-cycles"));
        report.bound_claimed = k as u64;
        let certificate =
            Certificate::Packing { k, cycles: pack.cycles, bound_claimed: k as u64 };
        return Ok(SolveOutput { certificate, report });
    }
    if pack.count == 0 {
        report.note("no even A-cycles at all; empty cover");
        report.bound_claimed = 0;
        let certificate = Certificate::HittingSet {
            k,
            edges: Vec::new(),
            provenance: Vec::new(),
            bound_claimed: 0,
        };
        return Ok(SolveOutput { certificate, report });
    }
    let x = min_vertex_hitting_set(g, &CyclePredicate::even_a(), budget)?;
    report.note(format!("minimum vertex hitting set has {} vertices", x.len()));
    if x.len() == 1 && k >= 2 {
        let z = x[0];
        report.note(format!("single hitting vertex {z}; running the constructive engine"));
        let single = solve_single_z(&g.with_z(Some(z))?, k, SolveMode::Trusted, budget)?;
        let mut rep = single.report;
        rep.mode = "general:single-z".into();
        let mut lines = report.branch;
        lines.extend(rep.branch);
        rep.branch = lines;
        rep.bound_claimed = single_z_bound(k);
        return Ok(SolveOutput { certificate: single.certificate, report: rep });
    }
    // Oracle fallback; the composed bound is reported, not enforced.
    let hs = min_edge_hitting_set(g, &CyclePredicate::even_a(), budget)?;
    let claimed = single_z_bound(k).saturating_mul(x.len().max(1) as u64);
    report.note(format!(
        "oracle edge cover of {} edges; composed bound {claimed} not enforced",
        hs.len()
    ));
    report.bound_claimed = claimed;
    let provenance = vec![Provenance::Oracle; hs.len()];
    let certificate =
        Certificate::HittingSet { k, edges: hs, provenance, bound_claimed: claimed };
    Ok(SolveOutput { certificate, report })
}

#[cfg(test)]
mod tests;
