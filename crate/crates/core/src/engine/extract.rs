//! Reduced block tree and the packing extractors: when enough anchor blocks
//! exist, the degree / three-leaf / long-path trichotomy on the reduced tree
//! turns into `k` edge-disjoint even A-cycles.

use std::collections::{BTreeMap, BTreeSet};

use crate::blocks::{BlockTree, BtNode};
use crate::cycles::{abc_path, even_a_cycle_from_theta, AbcOutcome, ThetaWitness};
use crate::graph::{Cycle, LabeledGraph};
use crate::trees::{Tree, TrichotomyWitness};

use super::pipeline::Pipeline;
use super::EngineError;

/// The block tree with unlabeled leaves pruned and unlabeled degree-2
/// vertices suppressed; every leaf and degree-2 vertex of the result is an
/// anchor block. Edges remember the block-tree path they contract.
pub struct ReducedTree {
    pub tree: Tree,
    /// Tree vertex id to block-tree node.
    pub nodes: Vec<BtNode>,
    /// For each tree edge (canonical form over tree ids), the full
    /// block-tree path between its endpoints.
    pub edge_paths: BTreeMap<(u32, u32), Vec<BtNode>>,
}

impl ReducedTree {
    pub fn build(bt: &BlockTree, anchors: &[usize]) -> ReducedTree {
        let keep: BTreeSet<BtNode> = anchors.iter().map(|&b| BtNode::Block(b)).collect();
        // Live working copy: adjacency over BtNodes with path payloads.
        let mut adj: BTreeMap<BtNode, BTreeMap<BtNode, Vec<BtNode>>> = BTreeMap::new();
        for b in 0..bt.blocks.len() {
            let node = BtNode::Block(b);
            for w in bt.neighbors(node) {
                adj.entry(node).or_default().insert(w, vec![node, w]);
                adj.entry(w).or_default().insert(node, vec![w, node]);
            }
        }
        if adj.is_empty() {
            // Single block, no cutvertices.
            for b in 0..bt.blocks.len() {
                adj.entry(BtNode::Block(b)).or_default();
            }
        }
        loop {
            let mut changed = false;
            // Prune unlabeled leaves.
            let leaves: Vec<BtNode> = adj
                .iter()
                .filter(|(n, nb)| nb.len() <= 1 && !keep.contains(n))
                .map(|(n, _)| *n)
                .collect();
            for n in leaves {
                if let Some(nb) = adj.remove(&n) {
                    for (w, _) in nb {
                        adj.get_mut(&w).map(|m| m.remove(&n));
                    }
                    changed = true;
                }
            }
            // Suppress unlabeled degree-2 vertices.
            let mids: Vec<BtNode> = adj
                .iter()
                .filter(|(n, nb)| nb.len() == 2 && !keep.contains(n))
                .map(|(n, _)| *n)
                .collect();
            for n in mids {
                let Some(nb) = adj.get(&n) else { continue };
                if nb.len() != 2 {
                    continue;
                }
                let mut it = nb.iter();
                let (&a, pa) = it.next().unwrap();
                let (&b, pb) = it.next().unwrap();
                if adj.get(&a).is_some_and(|m| m.contains_key(&b)) {
                    continue; // suppression would create a parallel edge
                }
                // Path a .. n .. b.
                let mut path: Vec<BtNode> = pa.iter().rev().copied().collect();
                path.extend(pb.iter().skip(1));
                adj.remove(&n);
                adj.get_mut(&a).map(|m| m.remove(&n));
                adj.get_mut(&b).map(|m| m.remove(&n));
                adj.get_mut(&a).map(|m| m.insert(b, path.clone()));
                let rev: Vec<BtNode> = path.iter().rev().copied().collect();
                adj.get_mut(&b).map(|m| m.insert(a, rev));
                changed = true;
            }
            if !changed {
                break;
            }
        }
        let nodes: Vec<BtNode> = adj.keys().copied().collect();
        let index: BTreeMap<BtNode, u32> =
            nodes.iter().enumerate().map(|(i, &n)| (n, i as u32)).collect();
        let mut edges = Vec::new();
        let mut edge_paths = BTreeMap::new();
        for (&n, nb) in &adj {
            for (&w, path) in nb {
                let (i, j) = (index[&n], index[&w]);
                if i < j {
                    edges.push((i, j));
                    edge_paths.insert((i, j), path.clone());
                }
            }
        }
        let tree = Tree::new(nodes.len(), edges).expect("reduction keeps a tree");
        ReducedTree { tree, nodes, edge_paths }
    }

    /// Block-tree path for a tree edge, oriented from `i` to `j`.
    fn path_of(&self, i: u32, j: u32) -> Vec<BtNode> {
        if i < j {
            self.edge_paths[&(i, j)].clone()
        } else {
            let mut p = self.edge_paths[&(j, i)].clone();
            p.reverse();
            p
        }
    }
}

/// Turn a trichotomy witness on the reduced tree into `k` edge-disjoint even
/// A-cycles.
pub fn packing_from_tree_witness(
    pipe: &Pipeline,
    reduced: &ReducedTree,
    witness: &TrichotomyWitness,
) -> Result<Vec<Cycle>, EngineError> {
    let k = pipe.k;
    match witness {
        TrichotomyWitness::MaxDegree(tv) => {
            let center = reduced.nodes[*tv as usize];
            // One branch per tree edge at the center, each descending to a
            // reduced-tree leaf and then on to a block-tree leaf.
            let mut branches = Vec::new();
            for &w in reduced.tree.neighbors(*tv) {
                branches.push(branch_to_block_leaf(pipe, reduced, *tv, w));
            }
            branches.truncate(3 * k);
            if branches.len() < 3 * k {
                return Err(EngineError::Internal("degree witness too thin".into()));
            }
            let legs = branches
                .iter()
                .map(|b| leg_to_z(pipe, center, b))
                .collect::<Result<Vec<_>, _>>()?;
            assemble_thetas(pipe, center, &legs, k)
        }
        TrichotomyWitness::ThreeLeafPack(subs) => {
            let mut out = Vec::new();
            for sub in subs.iter().take(k) {
                // Three leaves of the reduced tree inside this subtree.
                let leaf_set: BTreeSet<u32> =
                    reduced.tree.leaves().into_iter().collect();
                let mut leaves: Vec<u32> = sub
                    .vertices
                    .iter()
                    .copied()
                    .filter(|v| leaf_set.contains(v))
                    .collect();
                leaves.truncate(3);
                if leaves.len() < 3 {
                    return Err(EngineError::Internal("subtree with too few leaves".into()));
                }
                // Claw center: the meeting point of the three leaf paths.
                let p01 = reduced.tree.path_between(leaves[0], leaves[1]);
                let on01: BTreeSet<u32> = p01.iter().copied().collect();
                let p2 = reduced.tree.path_between(leaves[2], leaves[0]);
                let hub = *p2.iter().find(|v| on01.contains(v)).expect("paths meet");
                let center = reduced.nodes[hub as usize];
                let mut legs = Vec::new();
                for &leaf in &leaves {
                    let tree_path = reduced.tree.path_between(hub, leaf);
                    // Expand to block-tree nodes, then extend to a block leaf.
                    let mut bt_path = vec![center];
                    for w in tree_path.windows(2) {
                        let seg = reduced.path_of(w[0], w[1]);
                        bt_path.extend(seg.into_iter().skip(1));
                    }
                    let full = extend_to_block_leaf(pipe, bt_path);
                    legs.push(leg_to_z(pipe, center, &full)?);
                }
                let cycles = assemble_thetas(pipe, center, &legs, 1)?;
                out.extend(cycles);
            }
            if out.len() < k {
                return Err(EngineError::Internal("three-leaf witness too thin".into()));
            }
            Ok(out)
        }
        TrichotomyWitness::LongPath(tpath) => {
            // Count branching vertices on the path; enough of them reduce to
            // the three-leaf case, otherwise the anchor blocks on the path
            // drive the ladder construction.
            let deg3: Vec<u32> = tpath
                .iter()
                .copied()
                .filter(|&v| reduced.tree.degree(v) >= 3)
                .collect();
            if deg3.len() >= 3 * k {
                let mut cycles = Vec::new();
                for t in 0..k {
                    let trio = &deg3[3 * t..3 * t + 3];
                    let hub = trio[1];
                    let center = reduced.nodes[hub as usize];
                    let mut legs = Vec::new();
                    for &v in trio {
                        // Off-path branch at v, descended to a leaf; routed
                        // from the hub along the path first.
                        let on_path: BTreeSet<u32> = tpath.iter().copied().collect();
                        let side = reduced
                            .tree
                            .neighbors(v)
                            .iter()
                            .copied()
                            .find(|w| !on_path.contains(w))
                            .ok_or_else(|| {
                                EngineError::Internal("branch vertex without side branch".into())
                            })?;
                        let mut tree_path = reduced.tree.path_between(hub, v);
                        tree_path.push(side);
                        let mut down = descend_to_tree_leaf(&reduced.tree, v, side);
                        tree_path.append(&mut down);
                        let mut bt_path = vec![center];
                        for w in tree_path.windows(2) {
                            let seg = reduced.path_of(w[0], w[1]);
                            bt_path.extend(seg.into_iter().skip(1));
                        }
                        let full = extend_to_block_leaf(pipe, bt_path);
                        legs.push(leg_to_z(pipe, center, &full)?);
                    }
                    cycles.extend(assemble_thetas(pipe, center, &legs, 1)?);
                }
                return Ok(cycles);
            }
            ladder_packing(pipe, reduced, tpath)
        }
    }
}

/// Expand the reduced-tree edge from `tv` toward `w` into a block-tree path,
/// continue to a reduced-tree leaf, then into pruned territory down to a
/// block-tree leaf block.
fn branch_to_block_leaf(pipe: &Pipeline, reduced: &ReducedTree, tv: u32, w: u32) -> Vec<BtNode> {
    let mut bt_path = reduced.path_of(tv, w);
    // Continue within the reduced tree to a leaf, always away from tv.
    let mut prev = tv;
    let mut cur = w;
    loop {
        let next = reduced
            .tree
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&x| x != prev);
        match next {
            Some(x) => {
                let seg = reduced.path_of(cur, x);
                bt_path.extend(seg.into_iter().skip(1));
                prev = cur;
                cur = x;
            }
            None => break,
        }
    }
    extend_to_block_leaf(pipe, bt_path)
}

fn descend_to_tree_leaf(tree: &Tree, from: u32, via: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut prev = from;
    let mut cur = via;
    loop {
        let next = tree.neighbors(cur).iter().copied().find(|&x| x != prev);
        match next {
            Some(x) => {
                out.push(x);
                prev = cur;
                cur = x;
            }
            None => break,
        }
    }
    out
}

/// Extend a block-tree path beyond its final node to a leaf block, walking
/// away from the path.
fn extend_to_block_leaf(pipe: &Pipeline, mut bt_path: Vec<BtNode>) -> Vec<BtNode> {
    loop {
        let last = *bt_path.last().unwrap();
        let is_leaf_block = matches!(last, BtNode::Block(b) if pipe.bt.block_cuts[b].len() <= 1);
        if is_leaf_block {
            return bt_path;
        }
        let prev = bt_path.len().checked_sub(2).map(|i| bt_path[i]);
        let next = pipe
            .bt
            .neighbors(last)
            .into_iter()
            .find(|&w| Some(w) != prev);
        match next {
            Some(w) => bt_path.push(w),
            None => return bt_path,
        }
    }
}

/// A leg: a path in the graph from the center's boundary cutvertex through
/// the branch blocks to `z`, routed through a labeled vertex on the way.
struct Leg {
    /// Vertex sequence from the cutvertex at the center to `z`, inclusive.
    path: Vec<u32>,
}

/// Build the graph-level leg for a block-tree branch. The branch path
/// starts at the center node; its second node is the boundary cutvertex
/// when the center is a block, or the center itself is the start vertex
/// when it is a cutvertex.
fn leg_to_z(pipe: &Pipeline, center: BtNode, bt_path: &[BtNode]) -> Result<Leg, EngineError> {
    let g = &pipe.g;
    // Start vertex and the list of blocks to traverse.
    let (start, blocks): (u32, Vec<usize>) = match center {
        BtNode::Cut(c) => {
            let blocks = bt_path
                .iter()
                .filter_map(|n| match n {
                    BtNode::Block(b) => Some(*b),
                    _ => None,
                })
                .collect();
            (c, blocks)
        }
        BtNode::Block(_) => {
            let BtNode::Cut(c) = bt_path[1] else {
                return Err(EngineError::Internal("branch must leave through a cut".into()));
            };
            let blocks = bt_path[1..]
                .iter()
                .filter_map(|n| match n {
                    BtNode::Block(b) => Some(*b),
                    _ => None,
                })
                .collect();
            (c, blocks)
        }
    };
    // The first anchor block along the branch carries the label to route
    // through.
    let anchor = blocks
        .iter()
        .copied()
        .find(|&b| pipe.bt.blocks[b].vertices.iter().any(|&v| g.is_a(v)));
    let Some(anchor) = anchor else {
        return Err(EngineError::Internal("branch without a labeled block".into()));
    };

    let mut path = vec![start];
    let mut entry = start;
    for (i, &b) in blocks.iter().enumerate() {
        let block = &pipe.bt.blocks[b];
        let cuts = &pipe.bt.block_cuts[b];
        let last = i + 1 == blocks.len();
        // Exit: the next cutvertex, or a non-cut z-neighbor in the leaf.
        let exit = if last {
            block
                .vertices
                .iter()
                .copied()
                .filter(|&v| v != entry && g.has_edge(v, z_of(pipe)))
                .min()
                .ok_or_else(|| {
                    EngineError::Internal("leaf block without its own z-neighbor".into())
                })?
        } else {
            cuts.iter()
                .copied()
                .find(|&c| c != entry && bt_path_contains_cut(bt_path, c))
                .ok_or_else(|| EngineError::Internal("branch lost its next cut".into()))?
        };
        let via = if b == anchor {
            block
                .vertices
                .iter()
                .copied()
                .filter(|&v| g.is_a(v))
                .min()
        } else {
            None
        };
        let seg = route_through_block(g, block, entry, exit, via)?;
        path.extend(seg.into_iter().skip(1));
        entry = exit;
    }
    path.push(z_of(pipe));
    Ok(Leg { path })
}

fn z_of(pipe: &Pipeline) -> u32 {
    pipe.z
}

fn bt_path_contains_cut(bt_path: &[BtNode], c: u32) -> bool {
    bt_path.iter().any(|n| matches!(n, BtNode::Cut(x) if *x == c))
}

/// Path across one block from `entry` to `exit`, through `via` when given.
fn route_through_block(
    g: &LabeledGraph,
    block: &crate::blocks::Block,
    entry: u32,
    exit: u32,
    via: Option<u32>,
) -> Result<Vec<u32>, EngineError> {
    let bg = LabeledGraph::new(g.n(), block.edges.iter().copied(), [], None)?;
    if entry == exit {
        return Ok(vec![entry]);
    }
    match via {
        Some(a) if a != entry && a != exit => match abc_path(&bg, entry, a, exit)? {
            AbcOutcome::Path(p) => Ok(p),
            AbcOutcome::Separator(_) => Err(EngineError::Internal(
                "block is not 2-connected around its label".into(),
            )),
        },
        _ => bg
            .bfs_path(entry, exit, |_| true)
            .ok_or_else(|| EngineError::Internal("block disconnected".into())),
    }
}

/// Group legs in threes; each triple meets the center (a star for a
/// cutvertex center, an in-block tree for a block center) and yields one
/// even A-cycle via a theta.
fn assemble_thetas(
    pipe: &Pipeline,
    center: BtNode,
    legs: &[Leg],
    want: usize,
) -> Result<Vec<Cycle>, EngineError> {
    let g = &pipe.g;
    let mut out = Vec::new();
    match center {
        BtNode::Cut(c) => {
            for t in 0..want {
                let trio = &legs[3 * t..3 * t + 3];
                let paths: [Vec<u32>; 3] = [
                    trio[0].path.clone(),
                    trio[1].path.clone(),
                    trio[2].path.clone(),
                ];
                debug_assert!(paths.iter().all(|p| p[0] == c));
                let theta = ThetaWitness::new(g, c, pipe.z, paths)?;
                out.push(even_a_cycle_from_theta(g, &theta, g.a_set())?);
            }
        }
        BtNode::Block(b) => {
            // Edge-disjoint spanning-tree pieces inside the block connect
            // the legs in threes; each piece names the legs it serves.
            let starts: Vec<u32> = legs.iter().map(|l| l.path[0]).collect();
            let pieces = tree_pieces_for_triples(pipe, b, &starts, want)?;
            for (piece_edges, leg_ids) in pieces.iter().take(want) {
                let trio_starts =
                    [starts[leg_ids[0]], starts[leg_ids[1]], starts[leg_ids[2]]];
                let (hub, spokes) = steiner_claw(piece_edges, &trio_starts)?;
                let mut paths: Vec<Vec<u32>> = Vec::new();
                for (i, spoke) in spokes.into_iter().enumerate() {
                    let mut p = spoke;
                    debug_assert_eq!(*p.last().unwrap(), trio_starts[i]);
                    p.extend(legs[leg_ids[i]].path.iter().skip(1));
                    paths.push(p);
                }
                let theta = ThetaWitness::new(
                    g,
                    hub,
                    pipe.z,
                    [paths[0].clone(), paths[1].clone(), paths[2].clone()],
                )?;
                out.push(even_a_cycle_from_theta(g, &theta, g.a_set())?);
            }
        }
    }
    Ok(out)
}

/// Edge-disjoint subtrees of the center block's spanning tree, each serving
/// three of the legs (identified by index), via the pendant-mark packing
/// with exhaustive escalation. A pendant per leg start keeps repeated
/// attachment vertices countable.
fn tree_pieces_for_triples(
    pipe: &Pipeline,
    b: usize,
    starts: &[u32],
    want: usize,
) -> Result<Vec<(Vec<(u32, u32)>, Vec<usize>)>, EngineError> {
    use crate::trees::{exact_subtree_packing, subtrees_meeting_z, PackSearch};
    let g = &pipe.g;
    let block = &pipe.bt.blocks[b];
    let bg = LabeledGraph::new(g.n(), block.edges.iter().copied(), [], None)?;
    // Spanning tree on dense ids, plus one pendant per leg start.
    let verts = &block.vertices;
    let dense: BTreeMap<u32, u32> =
        verts.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let root = verts[0];
    let mut parent: BTreeMap<u32, u32> = BTreeMap::new();
    parent.insert(root, root);
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(root);
    let mut tree_edges: Vec<(u32, u32)> = Vec::new();
    while let Some(u) = queue.pop_front() {
        for &w in bg.neighbors(u) {
            if w != root && !parent.contains_key(&w) {
                parent.insert(w, u);
                tree_edges.push((dense[&u].min(dense[&w]), dense[&u].max(dense[&w])));
                queue.push_back(w);
            }
        }
    }
    let base = verts.len() as u32;
    let mut marks: BTreeSet<u32> = BTreeSet::new();
    for (i, &s) in starts.iter().enumerate() {
        let pid = base + i as u32;
        tree_edges.push((dense[&s].min(pid), dense[&s].max(pid)));
        marks.insert(pid);
    }
    let t = Tree::new(verts.len() + starts.len(), tree_edges)?;
    let mut pieces = subtrees_meeting_z(&t, &marks, 3);
    if pieces.len() < want {
        match exact_subtree_packing(&t, &marks, 3, want, 1 << 24) {
            PackSearch::Found(p) => pieces = p,
            _ => {
                return Err(EngineError::Internal(
                    "no disjoint tree pieces for the leg triples".into(),
                ))
            }
        }
    }
    let mut out = Vec::new();
    for piece in &pieces {
        let mut leg_ids: Vec<usize> = piece
            .vertices
            .iter()
            .copied()
            .filter(|&v| v >= base)
            .map(|v| (v - base) as usize)
            .collect();
        leg_ids.sort_unstable();
        leg_ids.truncate(3);
        if leg_ids.len() < 3 {
            return Err(EngineError::Internal("tree piece with too few pendants".into()));
        }
        let real: Vec<(u32, u32)> = piece
            .edges
            .iter()
            .filter(|&&(x, y)| x < base && y < base)
            .map(|&(x, y)| {
                let a = verts[x as usize];
                let bq = verts[y as usize];
                (a.min(bq), a.max(bq))
            })
            .collect();
        out.push((real, leg_ids));
    }
    Ok(out)
}

/// Claw decomposition of a tree piece: the hub and the three hub-to-start
/// paths (hub equals a start in the degenerate middle case).
fn steiner_claw(
    piece_edges: &[(u32, u32)],
    starts: &[u32; 3],
) -> Result<(u32, Vec<Vec<u32>>), EngineError> {
    let mut adj: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &(x, y) in piece_edges {
        adj.entry(x).or_default().push(y);
        adj.entry(y).or_default().push(x);
    }
    let path = |from: u32, to: u32| -> Option<Vec<u32>> {
        if from == to {
            return Some(vec![from]);
        }
        let mut prev: BTreeMap<u32, u32> = BTreeMap::new();
        prev.insert(from, from);
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(from);
        while let Some(u) = queue.pop_front() {
            for &w in adj.get(&u).map(|v| v.as_slice()).unwrap_or(&[]) {
                if !prev.contains_key(&w) {
                    prev.insert(w, u);
                    if w == to {
                        let mut p = vec![to];
                        let mut cur = u;
                        loop {
                            p.push(cur);
                            if cur == from {
                                break;
                            }
                            cur = prev[&cur];
                        }
                        p.reverse();
                        return Some(p);
                    }
                    queue.push_back(w);
                }
            }
        }
        None
    };
    let p01 = path(starts[0], starts[1])
        .ok_or_else(|| EngineError::Internal("piece does not connect its starts".into()))?;
    let on01: BTreeSet<u32> = p01.iter().copied().collect();
    let p2 = path(starts[2], starts[0])
        .ok_or_else(|| EngineError::Internal("piece does not connect its starts".into()))?;
    let hub = *p2.iter().find(|v| on01.contains(v)).expect("paths meet");
    let spokes: Vec<Vec<u32>> = starts
        .iter()
        .map(|&s| {
            let mut p = path(hub, s).expect("piece is connected");
            if p.len() == 1 {
                p = vec![hub];
            }
            p
        })
        .collect();
    Ok((hub, spokes))
}

/// The long-path construction: consecutive runs of four anchor blocks each
/// carry a crossing path routed through labels at both ends, a side exit to
/// `z` in the middle, and triples of those close into thetas.
fn ladder_packing(
    pipe: &Pipeline,
    reduced: &ReducedTree,
    tpath: &[u32],
) -> Result<Vec<Cycle>, EngineError> {
    let g = &pipe.g;
    let k = pipe.k;
    // Expand the reduced path to a block-tree path.
    let mut bt_path: Vec<BtNode> = vec![reduced.nodes[tpath[0] as usize]];
    for w in tpath.windows(2) {
        let seg = reduced.path_of(w[0], w[1]);
        bt_path.extend(seg.into_iter().skip(1));
    }
    // Interior anchor blocks along the path (flanked by cuts on the path).
    let anchor_set: BTreeSet<usize> = pipe.anchor_blocks().into_iter().collect();
    let anchor_positions: Vec<usize> = (1..bt_path.len().saturating_sub(1))
        .filter(|&i| matches!(bt_path[i], BtNode::Block(b) if anchor_set.contains(&b)))
        .collect();
    if anchor_positions.len() < 12 * k {
        return Err(EngineError::Internal(format!(
            "only {} anchor blocks on the path for 12k = {}",
            anchor_positions.len(),
            12 * k
        )));
    }

    // 3k segments of four anchors each; segment s spans from the cut before
    // its first anchor to the cut after its fourth.
    struct Segment {
        from: usize, // index into bt_path (a cut)
        to: usize,   // index into bt_path (a cut)
        anchors: [usize; 4],
    }
    let mut segments = Vec::new();
    {
        let mut start_cut = anchor_positions[0] - 1;
        for s in 0..3 * k {
            let quad = &anchor_positions[4 * s..4 * s + 4];
            let end_cut = quad[3] + 1;
            segments.push(Segment {
                from: start_cut,
                to: end_cut,
                anchors: [quad[0], quad[1], quad[2], quad[3]],
            });
            start_cut = end_cut;
        }
    }

    // Per segment: crossing path through the labels of the first and fourth
    // anchor, plus a side exit to z between the second and third.
    struct Rail {
        path: Vec<u32>,            // from-cut .. to-cut
        exit: Vec<u32>,            // x .. z, x on path
        exit_pos_on_path: usize,
    }
    let mut rails: Vec<Rail> = Vec::new();
    for seg in &segments {
        let BtNode::Cut(first_cut) = bt_path[seg.from] else {
            return Err(EngineError::Internal("segment boundary is not a cut".into()));
        };
        // Walk the blocks of the segment.
        let mut path = vec![first_cut];
        let mut entry = first_cut;
        let mut i = seg.from + 1;
        while i < seg.to {
            let BtNode::Block(b) = bt_path[i] else {
                i += 1;
                continue;
            };
            let BtNode::Cut(exit) = bt_path[i + 1] else {
                return Err(EngineError::Internal("path alternation broken".into()));
            };
            let via = if i == seg.anchors[0] || i == seg.anchors[3] {
                pipe.bt.blocks[b].vertices.iter().copied().filter(|&v| g.is_a(v)).min()
            } else {
                None
            };
            let seg_path = route_through_block(g, &pipe.bt.blocks[b], entry, exit, via)?;
            path.extend(seg_path.into_iter().skip(1));
            entry = exit;
            i += 2;
        }
        // Side exit between the second and third anchor: first node in that
        // window with a z-neighbor in its block or a branch off the path.
        let window = (seg.anchors[1] - 1)..=(seg.anchors[2] + 1);
        let exit = find_side_exit(pipe, &bt_path, window.clone(), &path)?;
        let exit_pos_on_path = path
            .iter()
            .position(|&v| v == exit[0])
            .ok_or_else(|| EngineError::Internal("side exit misses the rail".into()))?;
        rails.push(Rail { path, exit, exit_pos_on_path });
    }

    // Triples of consecutive rails close into thetas.
    let mut out = Vec::new();
    for t in 0..k {
        let r0 = &rails[3 * t];
        let r1 = &rails[3 * t + 1];
        let r2 = &rails[3 * t + 2];
        // Path 1: z ..exit0.. along rail0 to its end, then rail1 up to exit1.
        let mut p1: Vec<u32> = r0.exit.iter().rev().skip(1).copied().collect();
        // p1 currently runs exit0-x .. (without z); build explicitly below.
        p1.clear();
        p1.extend(r0.exit.iter().rev().copied()); // z .. x0
        p1.extend(r0.path[r0.exit_pos_on_path + 1..].iter().copied()); // x0 .. end cut
        p1.extend(r1.path[1..=r1.exit_pos_on_path].iter().copied()); // .. x1
        let p2: Vec<u32> = r1.exit.iter().rev().copied().collect(); // z .. x1
        let mut p3: Vec<u32> = r2.exit.iter().rev().copied().collect(); // z .. x2
        let mut back: Vec<u32> =
            r2.path[..r2.exit_pos_on_path].iter().rev().copied().collect(); // x2-1 .. start cut
        p3.append(&mut back);
        let mut tail: Vec<u32> =
            r1.path[r1.exit_pos_on_path..r1.path.len() - 1].iter().rev().copied().collect();
        p3.append(&mut tail);
        // p3 now runs z .. x2 .. r2-start-cut(= r1 end) .. x1.
        let x1 = *p2.last().unwrap();
        debug_assert_eq!(*p1.last().unwrap(), x1);
        debug_assert_eq!(*p3.last().unwrap(), x1);
        let theta = ThetaWitness::new(g, pipe.z, x1, [p1, p2, p3])?;
        out.push(even_a_cycle_from_theta(g, &theta, g.a_set())?);
    }
    Ok(out)
}

/// A way out of the rail toward `z` inside the given block-tree window:
/// either a z-neighbor in a window block, or a branch hanging off the path.
fn find_side_exit(
    pipe: &Pipeline,
    bt_path: &[BtNode],
    window: std::ops::RangeInclusive<usize>,
    rail: &[u32],
) -> Result<Vec<u32>, EngineError> {
    let g = &pipe.g;
    let on_rail: BTreeSet<u32> = rail.iter().copied().collect();
    for i in window {
        match bt_path[i] {
            BtNode::Block(b) => {
                let block = &pipe.bt.blocks[b];
                // Direct z-neighbor in the block.
                if let Some(w) = block
                    .vertices
                    .iter()
                    .copied()
                    .filter(|&v| g.has_edge(v, pipe.z))
                    .min()
                {
                    let exit = exit_via_block(pipe, b, w, &on_rail)?;
                    return Ok(exit);
                }
                // A cutvertex of the block that leaves the path.
                let on_path_cuts: BTreeSet<u32> = bt_path
                    .iter()
                    .filter_map(|n| match n {
                        BtNode::Cut(c) => Some(*c),
                        _ => None,
                    })
                    .collect();
                if let Some(c) = pipe.bt.block_cuts[b]
                    .iter()
                    .copied()
                    .find(|c| !on_path_cuts.contains(c))
                {
                    let branch = super::pipeline::branch_path_to_z(
                        &pipe.g, pipe.z, &pipe.bt.blocks[b], c,
                    )?;
                    let head = exit_via_block(pipe, b, c, &on_rail)?;
                    let mut exit = head;
                    exit.pop(); // drop c, re-added by the branch
                    exit.extend(branch);
                    return Ok(exit);
                }
            }
            BtNode::Cut(c) => {
                // Branch hanging at a path cutvertex of higher degree.
                if pipe.bt.degree(BtNode::Cut(c)) >= 3 && on_rail.contains(&c) {
                    let off = pipe
                        .bt
                        .cut_blocks
                        .get(&c)
                        .into_iter()
                        .flatten()
                        .copied()
                        .find(|b| !bt_path.contains(&BtNode::Block(*b)));
                    if let Some(b0) = off {
                        let branch = super::pipeline::branch_from_cut_to_z(pipe, c, b0)?;
                        return Ok(branch);
                    }
                }
            }
        }
    }
    Err(EngineError::Internal("no side exit toward z in the window".into()))
}

/// Path from a block vertex `w` to the rail inside the block (first-contact)
/// followed by nothing; the caller appends the way to z. Returned rail-first
/// .. w, then z is appended by the caller when w neighbors z.
fn exit_via_block(
    pipe: &Pipeline,
    b: usize,
    w: u32,
    on_rail: &BTreeSet<u32>,
) -> Result<Vec<u32>, EngineError> {
    let g = &pipe.g;
    let block = &pipe.bt.blocks[b];
    let bg = LabeledGraph::new(g.n(), block.edges.iter().copied(), [], None)?;
    let allowed: BTreeSet<u32> = block.vertices.iter().copied().collect();
    let rail_in_block: BTreeSet<u32> =
        block.vertices.iter().copied().filter(|v| on_rail.contains(v)).collect();
    let mut path = super::pipeline::bfs_to_targets(&bg, w, &allowed, &rail_in_block)
        .ok_or_else(|| EngineError::Internal("block exit cannot reach the rail".into()))?;
    if g.has_edge(w, pipe.z) {
        path.push(pipe.z);
    }
    Ok(path)
}
