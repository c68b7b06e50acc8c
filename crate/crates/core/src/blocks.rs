//! Block-cut tree decomposition by lowpoint DFS.
//!
//! A *block* is a maximal 2-connected subgraph or a bridge edge. The block
//! tree is the bipartite tree on blocks and cutvertices where a block is
//! adjacent to exactly the cutvertices it contains. Bridges count as
//! (edge-)blocks.

use std::collections::BTreeMap;

use crate::graph::{edge, GraphError, LabeledGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    /// Sorted vertex set of the block.
    pub vertices: Vec<u32>,
    /// Sorted edge set; blocks partition the host's edges.
    pub edges: Vec<(u32, u32)>,
}

impl Block {
    pub fn is_bridge(&self) -> bool {
        self.edges.len() == 1
    }

    pub fn contains_vertex(&self, v: u32) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}

/// A node of the block tree: either a block (by index) or a cutvertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BtNode {
    Block(usize),
    Cut(u32),
}

#[derive(Clone, Debug)]
pub struct BlockTree {
    pub blocks: Vec<Block>,
    pub cutvertices: Vec<u32>,
    /// For each block index, the sorted cutvertices it contains.
    pub block_cuts: Vec<Vec<u32>>,
    /// For each cutvertex, the sorted block indices containing it.
    pub cut_blocks: BTreeMap<u32, Vec<usize>>,
}

impl BlockTree {
    pub fn is_cutvertex(&self, v: u32) -> bool {
        self.cut_blocks.contains_key(&v)
    }

    /// Block-tree degree of a node.
    pub fn degree(&self, node: BtNode) -> usize {
        match node {
            BtNode::Block(i) => self.block_cuts[i].len(),
            BtNode::Cut(v) => self.cut_blocks.get(&v).map_or(0, |b| b.len()),
        }
    }

    pub fn neighbors(&self, node: BtNode) -> Vec<BtNode> {
        match node {
            BtNode::Block(i) => self.block_cuts[i].iter().map(|&c| BtNode::Cut(c)).collect(),
            BtNode::Cut(v) => self
                .cut_blocks
                .get(&v)
                .map(|bs| bs.iter().map(|&b| BtNode::Block(b)).collect())
                .unwrap_or_default(),
        }
    }

    /// Blocks with at most one cutvertex. For a 2-connected host this is the
    /// single block itself.
    pub fn leaf_blocks(&self) -> Vec<usize> {
        (0..self.blocks.len())
            .filter(|&i| self.block_cuts[i].len() <= 1)
            .collect()
    }

    /// Indices of blocks containing vertex `v`.
    pub fn blocks_with_vertex(&self, v: u32) -> Vec<usize> {
        (0..self.blocks.len())
            .filter(|&i| self.blocks[i].contains_vertex(v))
            .collect()
    }

    /// Unique tree path between two nodes (inclusive).
    pub fn path(&self, from: BtNode, to: BtNode) -> Vec<BtNode> {
        if from == to {
            return vec![from];
        }
        let mut prev: BTreeMap<BtNode, BtNode> = BTreeMap::new();
        prev.insert(from, from);
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(from);
        while let Some(u) = queue.pop_front() {
            for w in self.neighbors(u) {
                if !prev.contains_key(&w) {
                    prev.insert(w, u);
                    if w == to {
                        let mut path = vec![to];
                        let mut cur = to;
                        while cur != from {
                            cur = prev[&cur];
                            path.push(cur);
                        }
                        path.reverse();
                        return path;
                    }
                    queue.push_back(w);
                }
            }
        }
        panic!("block tree is connected; no path {from:?} -> {to:?}");
    }

    /// All block-tree nodes, blocks first.
    pub fn nodes(&self) -> Vec<BtNode> {
        let mut out: Vec<BtNode> = (0..self.blocks.len()).map(BtNode::Block).collect();
        out.extend(self.cutvertices.iter().map(|&c| BtNode::Cut(c)));
        out
    }
}

/// Compute the block tree of `g`, or of `g - removed` when a vertex is given.
///
/// The surviving vertex set (ignoring vertices isolated by the removal of
/// `removed` only if the survivor count is one) must be connected.
pub fn block_tree(g: &LabeledGraph, removed: Option<u32>) -> Result<BlockTree, GraphError> {
    let n = g.n();
    let alive = |v: u32| Some(v) != removed;
    let survivors: Vec<u32> = (0..n as u32).filter(|&v| alive(v)).collect();
    if survivors.is_empty() {
        return Ok(BlockTree {
            blocks: Vec::new(),
            cutvertices: Vec::new(),
            block_cuts: Vec::new(),
            cut_blocks: BTreeMap::new(),
        });
    }

    // Connectivity over survivors.
    {
        let mut seen = vec![false; n];
        let mut comps = 0usize;
        for &s in &survivors {
            if seen[s as usize] {
                continue;
            }
            comps += 1;
            seen[s as usize] = true;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in g.neighbors(u) {
                    if alive(w) && !seen[w as usize] {
                        seen[w as usize] = true;
                        stack.push(w);
                    }
                }
            }
        }
        if comps != 1 {
            return Err(GraphError::Disconnected(comps));
        }
    }

    // Iterative lowpoint DFS with an edge stack.
    const UNSET: u32 = u32::MAX;
    let mut t_in = vec![UNSET; n];
    let mut low = vec![0u32; n];
    let mut parent = vec![UNSET; n];
    let mut timer = 0u32;
    let mut edge_stack: Vec<(u32, u32)> = Vec::new();
    let mut raw_blocks: Vec<Vec<(u32, u32)>> = Vec::new();

    let root = survivors[0];
    // (vertex, neighbor cursor)
    let mut call_stack: Vec<(u32, usize)> = Vec::new();
    t_in[root as usize] = timer;
    low[root as usize] = timer;
    timer += 1;
    call_stack.push((root, 0));
    while let Some(&mut (u, ref mut cursor)) = call_stack.last_mut() {
        let nbrs = g.neighbors(u);
        if *cursor < nbrs.len() {
            let w = nbrs[*cursor];
            *cursor += 1;
            if !alive(w) || w == parent[u as usize] {
                continue;
            }
            if t_in[w as usize] == UNSET {
                parent[w as usize] = u;
                edge_stack.push((u, w));
                t_in[w as usize] = timer;
                low[w as usize] = timer;
                timer += 1;
                call_stack.push((w, 0));
            } else if t_in[w as usize] < t_in[u as usize] {
                edge_stack.push((u, w));
                low[u as usize] = low[u as usize].min(t_in[w as usize]);
            }
        } else {
            call_stack.pop();
            if let Some(&(p, _)) = call_stack.last() {
                low[p as usize] = low[p as usize].min(low[u as usize]);
                if low[u as usize] >= t_in[p as usize] {
                    // (p, u) closes a block.
                    let mut es = Vec::new();
                    while let Some(e) = edge_stack.pop() {
                        es.push(edge(e.0, e.1));
                        if e == (p, u) {
                            break;
                        }
                    }
                    raw_blocks.push(es);
                }
            }
        }
    }

    // Canonical block order: by sorted vertex list, then edge list.
    let mut blocks: Vec<Block> = raw_blocks
        .into_iter()
        .map(|mut es| {
            es.sort_unstable();
            es.dedup();
            let mut vs: Vec<u32> = es.iter().flat_map(|&(x, y)| [x, y]).collect();
            vs.sort_unstable();
            vs.dedup();
            Block { vertices: vs, edges: es }
        })
        .collect();
    blocks.sort_by(|a, b| (&a.vertices, &a.edges).cmp(&(&b.vertices, &b.edges)));

    let mut in_blocks: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, b) in blocks.iter().enumerate() {
        for &v in &b.vertices {
            in_blocks.entry(v).or_default().push(i);
        }
    }
    let cut_blocks: BTreeMap<u32, Vec<usize>> = in_blocks
        .into_iter()
        .filter(|(_, bs)| bs.len() >= 2)
        .collect();
    let cutvertices: Vec<u32> = cut_blocks.keys().copied().collect();
    let block_cuts: Vec<Vec<u32>> = blocks
        .iter()
        .map(|b| {
            b.vertices
                .iter()
                .copied()
                .filter(|v| cut_blocks.contains_key(v))
                .collect()
        })
        .collect();

    Ok(BlockTree { blocks, cutvertices, block_cuts, cut_blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use std::collections::BTreeSet;

    #[test]
    fn triangle_is_one_block() {
        let g = LabeledGraph::new(3, [(0, 1), (1, 2), (0, 2)], [], None).unwrap();
        let bt = block_tree(&g, None).unwrap();
        assert_eq!(bt.blocks.len(), 1);
        assert!(bt.cutvertices.is_empty());
        assert_eq!(bt.blocks[0].vertices, vec![0, 1, 2]);
    }

    #[test]
    fn path_has_two_bridge_blocks() {
        let g = LabeledGraph::new(3, [(0, 1), (1, 2)], [], None).unwrap();
        let bt = block_tree(&g, None).unwrap();
        assert_eq!(bt.blocks.len(), 2);
        assert!(bt.blocks.iter().all(Block::is_bridge));
        assert_eq!(bt.cutvertices, vec![1]);
    }

    #[test]
    fn two_triangles_sharing_a_vertex() {
        let g = LabeledGraph::new(
            5,
            [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)],
            [],
            None,
        )
        .unwrap();
        let bt = block_tree(&g, None).unwrap();
        assert_eq!(bt.blocks.len(), 2);
        assert_eq!(bt.cutvertices, vec![2]);
        assert_eq!(bt.degree(BtNode::Cut(2)), 2);
        // Tree is a path of length 2 between the two blocks.
        let p = bt.path(BtNode::Block(0), BtNode::Block(1));
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn removal_argument_computes_tree_of_g_minus_z() {
        // Two 4-cycles sharing only z = 0.
        let g = LabeledGraph::new(
            7,
            [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5), (5, 6), (6, 0)],
            [],
            Some(0),
        )
        .unwrap();
        let bt = block_tree(&g, Some(0)).unwrap_err();
        // Removing z disconnects the two arcs.
        assert!(matches!(bt, GraphError::Disconnected(_)));
    }

    #[test]
    fn disconnected_input_is_an_error() {
        let g = LabeledGraph::new(4, [(0, 1), (2, 3)], [], None).unwrap();
        assert!(block_tree(&g, None).is_err());
    }

    /// Independent definition: two edges share a block iff some cycle
    /// contains both (bridges form singleton classes).
    fn brute_blocks(g: &LabeledGraph) -> BTreeSet<Vec<(u32, u32)>> {
        use crate::cycles::{enumerate_cycles, CyclePredicate};
        let cycles = enumerate_cycles(g, &CyclePredicate::default(), None, 1 << 22).unwrap();
        let m = g.edge_count();
        let idx: BTreeMap<(u32, u32), usize> =
            g.edges().iter().copied().enumerate().map(|(i, e)| (e, i)).collect();
        let mut uf: Vec<usize> = (0..m).collect();
        fn find(uf: &mut Vec<usize>, x: usize) -> usize {
            if uf[x] != x {
                let r = find(uf, uf[x]);
                uf[x] = r;
            }
            uf[x]
        }
        for c in &cycles {
            let es = c.edge_set();
            let first = idx[&es[0]];
            for e in &es[1..] {
                let (a, b) = (find(&mut uf, first), find(&mut uf, idx[e]));
                uf[a] = b;
            }
        }
        let mut classes: BTreeMap<usize, Vec<(u32, u32)>> = BTreeMap::new();
        for (e, &i) in &idx {
            let r = find(&mut uf, i);
            classes.entry(r).or_default().push(*e);
        }
        classes
            .into_values()
            .map(|mut es| {
                es.sort_unstable();
                es
            })
            .collect()
    }

    #[test]
    fn matches_cycle_based_definition_on_random_graphs() {
        let mut checked = 0;
        for seed in 0..60u64 {
            let g = gen::gnp_connected(7, 0.4, seed);
            let bt = block_tree(&g, None).unwrap();
            let ours: BTreeSet<Vec<(u32, u32)>> =
                bt.blocks.iter().map(|b| b.edges.clone()).collect();
            assert_eq!(ours, brute_blocks(&g), "seed {seed}");
            // Blocks partition the edge set.
            let total: usize = bt.blocks.iter().map(|b| b.edges.len()).sum();
            assert_eq!(total, g.edge_count());
            // Cutvertices are exactly the vertices in >= 2 blocks.
            for v in g.vertices() {
                let cnt = bt.blocks_with_vertex(v).len();
                assert_eq!(cnt >= 2, bt.is_cutvertex(v));
            }
            checked += 1;
        }
        assert!(checked > 0);
    }

    #[test]
    fn block_tree_shape_invariant_under_relabeling() {
        let g = gen::gnp_connected(8, 0.35, 7);
        let bt = block_tree(&g, None).unwrap();
        // Relabel by reversing ids.
        let n = g.n() as u32;
        let edges: Vec<(u32, u32)> =
            g.edges().iter().map(|&(u, v)| (n - 1 - u, n - 1 - v)).collect();
        let g2 = LabeledGraph::new(g.n(), edges, [], None).unwrap();
        let bt2 = block_tree(&g2, None).unwrap();
        assert_eq!(bt.blocks.len(), bt2.blocks.len());
        assert_eq!(bt.cutvertices.len(), bt2.cutvertices.len());
        let mut sizes: Vec<usize> = bt.blocks.iter().map(|b| b.edges.len()).collect();
        let mut sizes2: Vec<usize> = bt2.blocks.iter().map(|b| b.edges.len()).collect();
        sizes.sort_unstable();
        sizes2.sort_unstable();
        assert_eq!(sizes, sizes2);
    }
}
