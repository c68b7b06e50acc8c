//! The per-block constructive pipeline: strings of the block tree of
//! `g - z`, per-block and per-string covers, and the final assembly or the
//! packing extracted through the reduced-tree trichotomy.

use std::collections::{BTreeMap, BTreeSet};

use crate::blocks::{Block, BlockTree, BtNode};
use crate::certificate::{Certificate, Provenance};
use crate::cycles::{
    abc_path, enumerate_cycles, even_a_cycle_from_theta, theta_from_cycle_and_path, AbcOutcome,
    CyclePredicate, ThetaWitness,
};
use crate::flow::FlowNet;
use crate::graph::{edge, Cycle, LabeledGraph};
use crate::oracle::{self, OracleBudget};
use crate::trees::tree_trichotomy;

use super::{
    block_tree_of_z_component, check_block_degree, handle_z_in_a, single_z_bound,
    BlockDegreeOutcome, EngineError, SolveReport,
};

/// A maximal run of degree-2, z-free blocks whose end blocks meet `A`,
/// written as alternating cutvertices and block indices.
#[derive(Clone, Debug)]
pub struct StringPath {
    /// Cutvertices `b_0 .. b_l`, one more than the blocks.
    pub cuts: Vec<u32>,
    /// Block indices `B_1 .. B_l` into the pipeline's block tree.
    pub blocks: Vec<usize>,
}

pub enum BlockHit {
    Edges(Vec<(u32, u32)>),
    Packing(Vec<Cycle>),
}

pub enum StringHit {
    Edges(Vec<(u32, u32)>),
    Packing(Vec<Cycle>),
}

/// Pipeline state for one 2-connected host containing the hitting vertex.
pub struct Pipeline {
    pub g: LabeledGraph,
    pub k: usize,
    pub z: u32,
    pub bt: BlockTree,
    strings: Vec<StringPath>,
    /// For each block index, the string containing it, if any.
    in_string: Vec<Option<usize>>,
    /// A-blocks not inside any string.
    unstrung: Vec<usize>,
}

impl Pipeline {
    /// Build the state: block tree of `g - z`, strings, and the A-block
    /// partition. Requires the leaf-block property of 2-connected hosts
    /// (every leaf block holds a z-neighbor outside its cutvertex).
    pub fn new(g: &LabeledGraph, k: usize) -> Result<Self, EngineError> {
        let z = g.z().ok_or_else(|| EngineError::Precondition("no z mark".into()))?;
        if k < 2 {
            return Err(EngineError::Precondition("pipeline needs k >= 2".into()));
        }
        let bt = block_tree_of_z_component(g, z)?;
        // Leaf-block property; holds exactly when the host is 2-connected.
        for bi in bt.leaf_blocks() {
            let block = &bt.blocks[bi];
            let cuts = &bt.block_cuts[bi];
            let ok = block
                .vertices
                .iter()
                .any(|v| !cuts.contains(v) && g.has_edge(*v, z));
            if !ok && !block.vertices.is_empty() {
                return Err(EngineError::Precondition(
                    "leaf block without its own neighbor of z; host not 2-connected".into(),
                ));
            }
        }
        let strings = find_strings_impl(g, z, &bt);
        let mut in_string = vec![None; bt.blocks.len()];
        for (si, s) in strings.iter().enumerate() {
            for &b in &s.blocks {
                in_string[b] = Some(si);
            }
        }
        let unstrung: Vec<usize> = (0..bt.blocks.len())
            .filter(|&b| {
                in_string[b].is_none() && bt.blocks[b].vertices.iter().any(|&v| g.is_a(v))
            })
            .collect();
        Ok(Self { g: g.clone(), k, z, bt, strings, in_string, unstrung })
    }

    pub fn strings(&self) -> &[StringPath] {
        &self.strings
    }

    /// A-blocks contained in no string.
    pub fn unstrung_a_blocks(&self) -> &[usize] {
        &self.unstrung
    }

    /// One chosen A-block per string (its first end block).
    pub fn chosen_string_blocks(&self) -> Vec<usize> {
        self.strings.iter().map(|s| s.blocks[0]).collect()
    }

    /// Blocks that anchor the reduced tree: chosen string blocks plus the
    /// unstrung A-blocks.
    pub fn anchor_blocks(&self) -> Vec<usize> {
        let mut out = self.chosen_string_blocks();
        out.extend(self.unstrung.iter().copied());
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Full solve for this host: the z-in-A case, the packing threshold
    /// dichotomy, and otherwise the assembled per-string and per-block
    /// cover.
    pub fn solve(
        &mut self,
        report: &mut SolveReport,
        budget: &OracleBudget,
    ) -> Result<Certificate, EngineError> {
        let k = self.k;
        if self.g.is_a(self.z) {
            report.note("hitting vertex is labeled: degree dichotomy at z");
            return handle_z_in_a(&self.g, k).map(|c| {
                if let Certificate::HittingSet { ref edges, .. } = c {
                    report.note(format!("cover of {} z-incident edges", edges.len()));
                }
                c
            });
        }
        match check_block_degree(&self.g)? {
            BlockDegreeOutcome::Ok => {}
            BlockDegreeOutcome::Violation { cycle, .. } => {
                return Err(EngineError::SingleZViolation { cycle });
            }
        }

        let anchors = self.anchor_blocks();
        report.cover_units = self.strings.len() + self.unstrung.len();
        if (anchors.len() as u64) >= report.packing_threshold {
            report.note(format!(
                "{} anchor blocks meet the packing threshold {}",
                anchors.len(),
                report.packing_threshold
            ));
            let reduced = super::extract::ReducedTree::build(&self.bt, &anchors);
            let witness =
                tree_trichotomy(&reduced.tree, 3 * k, k, 15 * k).map_err(EngineError::Graph)?;
            report.note(format!(
                "trichotomy witness: {}",
                match &witness {
                    crate::trees::TrichotomyWitness::MaxDegree(_) => "high-degree vertex",
                    crate::trees::TrichotomyWitness::ThreeLeafPack(_) => "three-leaf subtrees",
                    crate::trees::TrichotomyWitness::LongPath(_) => "long path",
                }
            ));
            let cycles = super::extract::packing_from_tree_witness(self, &reduced, &witness)?;
            return Ok(Certificate::Packing { k, cycles, bound_claimed: k as u64 });
        }

        // Assembly: strings first, then unstrung A-blocks.
        let mut edges: Vec<(u32, u32)> = Vec::new();
        let mut provenance: Vec<Provenance> = Vec::new();
        let mut seen: BTreeSet<(u32, u32)> = BTreeSet::new();
        for si in 0..self.strings.len() {
            match self.string_hitting_set(si, report, budget)? {
                StringHit::Packing(cycles) => {
                    report.note(format!("string {si} yielded a packing"));
                    return Ok(Certificate::Packing { k, cycles, bound_claimed: k as u64 });
                }
                StringHit::Edges(es) => {
                    report.string_cover_sizes.push(es.len());
                    for e in es {
                        if seen.insert(e) {
                            edges.push(e);
                            provenance.push(Provenance::BlockString(si));
                        }
                    }
                }
            }
        }
        for &b in &self.unstrung.clone() {
            match self.block_hitting_set(b)? {
                BlockHit::Packing(cycles) => {
                    report.note(format!("block {b} yielded a packing"));
                    return Ok(Certificate::Packing { k, cycles, bound_claimed: k as u64 });
                }
                BlockHit::Edges(es) => {
                    report.block_cover_sizes.push(es.len());
                    for e in es {
                        if seen.insert(e) {
                            edges.push(e);
                            provenance.push(Provenance::Block(b));
                        }
                    }
                }
            }
        }
        let bound = single_z_bound(k);
        debug_assert!(edges.len() as u64 <= bound);
        Ok(Certificate::HittingSet { k, edges, provenance, bound_claimed: bound })
    }

    fn block_graph(&self, b: usize) -> LabeledGraph {
        let block = &self.bt.blocks[b];
        let a = block.vertices.iter().copied().filter(|&v| self.g.is_a(v));
        LabeledGraph::new(self.g.n(), block.edges.iter().copied(), a, None)
            .expect("block subgraph is valid")
    }

    /// Cover for every even A-cycle that uses an A-incident edge of block
    /// `b`: at most two labeled vertices in the block are covered directly;
    /// otherwise the covering cycle's segment structure either localizes the
    /// attachments onto few labeled boundaries or yields `k` disjoint even
    /// A-cycles.
    pub fn block_hitting_set(&self, b: usize) -> Result<BlockHit, EngineError> {
        let g = &self.g;
        let k = self.k;
        let block = &self.bt.blocks[b];
        let a_in: Vec<u32> = block.vertices.iter().copied().filter(|&v| g.is_a(v)).collect();
        if a_in.len() <= 2 {
            let mut es: Vec<(u32, u32)> = block
                .edges
                .iter()
                .copied()
                .filter(|&(x, y)| g.is_a(x) || g.is_a(y))
                .collect();
            es.sort_unstable();
            es.dedup();
            return Ok(BlockHit::Edges(es));
        }

        let bg = self.block_graph(b);
        // A labeled vertex has exactly two block neighbors here (the degree
        // check ran first and the block is 2-connected).
        let a0 = a_in[0];
        let nbrs = bg.neighbors(a0);
        if nbrs.len() != 2 {
            return Err(EngineError::Internal(format!(
                "labeled vertex {a0} has {} block neighbors",
                nbrs.len()
            )));
        }
        let (n1, n2) = (nbrs[0], nbrs[1]);
        let around = bg
            .bfs_path(n1, n2, |v| v != a0)
            .ok_or_else(|| EngineError::Internal("block not 2-connected around label".into()))?;
        let mut cycle_vs = vec![a0];
        cycle_vs.extend(around);
        let c = Cycle::new(g, cycle_vs)?;

        // Every labeled vertex of the block must lie on the cycle.
        for &a in &a_in {
            if !c.contains_vertex(a) {
                return Err(EngineError::Internal(format!(
                    "labeled vertex {a} off the block cycle contradicts the hitting vertex"
                )));
            }
        }
        let cvs = c.vertices();
        let on_c: BTreeSet<u32> = cvs.iter().copied().collect();
        // Labeled positions in cycle order; arcs between consecutive ones.
        let label_pos: Vec<usize> =
            (0..cvs.len()).filter(|&i| g.is_a(cvs[i])).collect();
        let ell = label_pos.len();
        let arc = |j: usize| -> Vec<u32> {
            // Vertices from label j to label j+1, inclusive.
            let from = label_pos[j];
            let to = label_pos[(j + 1) % ell];
            let mut out = Vec::new();
            let mut i = from;
            loop {
                out.push(cvs[i]);
                if i == to {
                    break;
                }
                i = (i + 1) % cvs.len();
            }
            out
        };

        // Assign off-cycle components and chords to arc segments.
        let mut segment_of: BTreeMap<u32, usize> = BTreeMap::new();
        let mut arc_interiors: Vec<BTreeSet<u32>> = Vec::new();
        for j in 0..ell {
            let a = arc(j);
            let interior: BTreeSet<u32> =
                a[1..a.len() - 1].iter().copied().collect();
            for &v in &interior {
                segment_of.insert(v, j);
            }
            arc_interiors.push(interior);
        }
        let mut comp_seen: BTreeSet<u32> = BTreeSet::new();
        let mut segment_extra: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); ell];
        for v in block.vertices.iter().copied() {
            if on_c.contains(&v) || comp_seen.contains(&v) {
                continue;
            }
            // Flood the off-cycle component.
            let mut comp = vec![v];
            comp_seen.insert(v);
            let mut stack = vec![v];
            let mut attach: BTreeSet<u32> = BTreeSet::new();
            while let Some(u) = stack.pop() {
                for &w in bg.neighbors(u) {
                    if on_c.contains(&w) {
                        attach.insert(w);
                    } else if comp_seen.insert(w) {
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            let segs: BTreeSet<usize> = attach
                .iter()
                .filter_map(|w| segment_of.get(w).copied())
                .collect();
            if attach.iter().any(|w| g.is_a(*w)) || segs.len() != 1 {
                return Err(EngineError::Internal(
                    "off-cycle attachment spans labeled boundaries; contradicts the hitting vertex"
                        .into(),
                ));
            }
            let s = *segs.iter().next().unwrap();
            for u in comp {
                segment_extra[s].insert(u);
            }
        }
        for &(x, y) in &block.edges {
            if on_c.contains(&x) && on_c.contains(&y) && !c.contains_edge((x, y)) {
                let (sx, sy) = (segment_of.get(&x), segment_of.get(&y));
                if sx.is_none() || sx != sy {
                    return Err(EngineError::Internal(
                        "chord across labeled boundaries; contradicts the hitting vertex".into(),
                    ));
                }
            }
        }

        // Segment j owns arc(j) plus its attached components; attachments
        // are z-neighbors or cutvertices anywhere except the far label.
        let label_at = |j: usize| cvs[label_pos[j % ell]];
        let is_attachment = |v: u32| -> bool {
            g.has_edge(v, self.z) || self.bt.is_cutvertex(v)
        };
        let mut selected: Vec<usize> = Vec::new();
        for j in 0..ell {
            let far = label_at(j + 1);
            let holds = arc(j)
                .iter()
                .copied()
                .chain(segment_extra[j].iter().copied())
                .any(|v| v != far && is_attachment(v));
            if holds {
                selected.push(j);
            }
        }

        if selected.len() < 3 * k {
            let mut labels: BTreeSet<u32> = BTreeSet::new();
            for &j in &selected {
                labels.insert(label_at(j));
                labels.insert(label_at(j + 1));
            }
            let mut es: Vec<(u32, u32)> = block
                .edges
                .iter()
                .copied()
                .filter(|&(x, y)| labels.contains(&x) || labels.contains(&y))
                .collect();
            es.sort_unstable();
            es.dedup();
            debug_assert!(es.len() <= 12 * k);
            return Ok(BlockHit::Edges(es));
        }

        // Enough attached segments: three consecutive ones give a theta, so
        // k disjoint even A-cycles come out.
        let chosen: Vec<usize> = selected.iter().copied().take(3 * k).collect();
        let mut exits: Vec<(Vec<u32>, usize)> = Vec::new(); // path q..z, position of q on C
        for &j in &chosen {
            let far = label_at(j + 1);
            let own: BTreeSet<u32> = arc(j)
                .iter()
                .copied()
                .chain(segment_extra[j].iter().copied())
                .filter(|&v| v != far)
                .collect();
            let w = own
                .iter()
                .copied()
                .filter(|&v| is_attachment(v))
                .min()
                .expect("segment was selected");
            // Path from the cycle to w inside the segment.
            let arc_set: BTreeSet<u32> =
                arc(j).iter().copied().filter(|&v| v != far).collect();
            let to_c = bfs_to_targets(&bg, w, &own, &arc_set)
                .ok_or_else(|| EngineError::Internal("segment disconnected".into()))?;
            // to_c runs from a cycle vertex q to w.
            let mut q_to_z = to_c;
            if g.has_edge(w, self.z) {
                q_to_z.push(self.z);
            } else {
                // Ride the block tree branch hanging at the cutvertex w.
                let branch = branch_path_to_z(g, self.z, block, w)?;
                q_to_z.extend(branch.into_iter().skip(1));
            }
            let q = q_to_z[0];
            let pos = cvs.iter().position(|&v| v == q).unwrap();
            exits.push((q_to_z, pos));
        }
        // Arcs between consecutive exits, in cycle order of the chosen
        // segments (selection order is already cyclic).
        let mut cycles_out = Vec::new();
        for t in 0..k {
            let (q0, p0) = &exits[3 * t];
            let (q1, p1) = &exits[3 * t + 1];
            let (q2, p2) = &exits[3 * t + 2];
            let r0 = cycle_arc(cvs, *p0, *p1);
            let r1 = cycle_arc(cvs, *p1, *p2);
            // Three paths from the middle exit's cycle vertex to z.
            let mut path1: Vec<u32> = r0.iter().rev().copied().collect();
            path1.extend(q0.iter().skip(1));
            let path2 = q1.clone();
            let mut path3 = r1.clone();
            path3.extend(q2.iter().skip(1));
            let theta = ThetaWitness::new(g, cvs[*p1], self.z, [path1, path2, path3])?;
            cycles_out.push(even_a_cycle_from_theta(g, &theta, g.a_set())?);
        }
        Ok(BlockHit::Packing(cycles_out))
    }

    /// Cover for every even A-cycle using an A-incident edge of string `si`,
    /// or `k` disjoint even A-cycles when the string is too well connected.
    pub fn string_hitting_set(
        &mut self,
        si: usize,
        report: &mut SolveReport,
        budget: &OracleBudget,
    ) -> Result<StringHit, EngineError> {
        let k = self.k;
        let s = self.strings[si].clone();
        let a_block_count = s
            .blocks
            .iter()
            .filter(|&&b| self.bt.blocks[b].vertices.iter().any(|&v| self.g.is_a(v)))
            .count();

        if a_block_count < 2 * k {
            let mut out: Vec<(u32, u32)> = Vec::new();
            for &b in &s.blocks {
                if !self.bt.blocks[b].vertices.iter().any(|&v| self.g.is_a(v)) {
                    continue;
                }
                match self.block_hitting_set(b)? {
                    BlockHit::Packing(c) => return Ok(StringHit::Packing(c)),
                    BlockHit::Edges(es) => {
                        report.block_cover_sizes.push(es.len());
                        out.extend(es);
                    }
                }
            }
            out.sort_unstable();
            out.dedup();
            debug_assert!(out.len() <= 24 * k * k);
            return Ok(StringHit::Edges(out));
        }

        // Many A-blocks: look for a small separating edge set first.
        let b0 = s.cuts[0];
        let bl = *s.cuts.last().unwrap();
        let s_vertices: BTreeSet<u32> = s
            .blocks
            .iter()
            .flat_map(|&b| self.bt.blocks[b].vertices.iter().copied())
            .collect();
        let s_edges: Vec<(u32, u32)> = s
            .blocks
            .iter()
            .flat_map(|&b| self.bt.blocks[b].edges.iter().copied())
            .collect();
        let cut_cap = 10 * k;
        for (what, src, dst, drop_all_but) in [
            ("z side of the first cut", self.z, b0, b0),
            ("z side of the last cut", self.z, bl, bl),
        ] {
            let keep = |v: u32| !s_vertices.contains(&v) || v == drop_all_but;
            if let Some(cut) = small_edge_cut(&self.g, src, dst, keep, cut_cap) {
                report.note(format!("string {si}: cut of {} edges toward the {what}", cut.len()));
                return Ok(StringHit::Edges(cut));
            }
        }
        {
            let sub = LabeledGraph::new(self.g.n(), s_edges.clone(), [], None)?;
            if let Some(cut) = small_edge_cut(&sub, b0, bl, |v| s_vertices.contains(&v), cut_cap) {
                report.note(format!("string {si}: internal cut of {} edges", cut.len()));
                return Ok(StringHit::Edges(cut));
            }
        }

        report.note(format!("string {si}: no small cut; extracting a packing"));
        match self.string_packing(si, budget) {
            Ok(cycles) => Ok(StringHit::Packing(cycles)),
            Err(primary) => {
                // Robustness net for the flagged constructive step: exact
                // oracles take over at desk scale.
                report.note(format!(
                    "string {si}: constructive route failed ({primary}); oracle fallback"
                ));
                let pack = oracle::max_edge_disjoint_packing(
                    &self.g,
                    &CyclePredicate::even_a(),
                    Some(k),
                    budget,
                )?;
                if pack.count >= k {
                    return Ok(StringHit::Packing(pack.cycles));
                }
                let cover = self.oracle_string_cover(&s, budget)?;
                if cover.len() <= 24 * k * k {
                    return Ok(StringHit::Edges(cover));
                }
                Err(primary)
            }
        }
    }

    /// The constructive route in the well-connected case: pull 10k cycles
    /// through z and the whole string out of a joint flow, repair them so 2k
    /// labeled vertices sit on distinct cycles, and pair those up into
    /// thetas.
    fn string_packing(
        &self,
        si: usize,
        _budget: &OracleBudget,
    ) -> Result<Vec<Cycle>, EngineError> {
        let k = self.k;
        let s = self.strings[si].clone();
        let g = &self.g;
        let b0 = s.cuts[0];
        let bl = *s.cuts.last().unwrap();
        let s_vertices: BTreeSet<u32> = s
            .blocks
            .iter()
            .flat_map(|&b| self.bt.blocks[b].vertices.iter().copied())
            .collect();

        // Joint vertex-capacitated flow: 10k paths from z to each of b0 and
        // bl, all internally disjoint, outside the string's interior.
        let count = 10 * k;
        let n = g.n();
        let sink = 2 * n;
        let mut net = FlowNet::new(2 * n + 1);
        let in_of = |v: u32| 2 * v as usize;
        let out_of = |v: u32| 2 * v as usize + 1;
        let interior = |v: u32| s_vertices.contains(&v) && v != b0 && v != bl;
        for v in 0..n as u32 {
            if v == self.z || v == b0 || v == bl || interior(v) {
                continue;
            }
            net.add_arc(in_of(v), out_of(v), 1);
        }
        net.add_arc(in_of(b0), sink, count as i64);
        net.add_arc(in_of(bl), sink, count as i64);
        for &(x, y) in g.edges() {
            for (p, q) in [(x, y), (y, x)] {
                if interior(p) || interior(q) || q == self.z || p == b0 || p == bl {
                    continue;
                }
                let from = if p == self.z { out_of(p) } else { out_of(p) };
                net.add_arc(from, in_of(q), 1);
            }
        }
        let source = out_of(self.z);
        let have = net.max_flow(source, sink, 2 * count as i64);
        if have < 2 * count as i64 {
            return Err(EngineError::Internal(format!(
                "joint flow {have} below {}",
                2 * count
            )));
        }
        let mut legs0: Vec<Vec<u32>> = Vec::new();
        let mut legs1: Vec<Vec<u32>> = Vec::new();
        for node_path in net.decompose_paths(source, sink) {
            let mut vs = vec![self.z];
            for &node in &node_path[1..node_path.len() - 1] {
                let v = (node / 2) as u32;
                if *vs.last().unwrap() != v {
                    vs.push(v);
                }
            }
            if *vs.last().unwrap() == b0 {
                legs0.push(vs);
            } else {
                debug_assert_eq!(*vs.last().unwrap(), bl);
                legs1.push(vs);
            }
        }
        if legs0.len() < count || legs1.len() < count {
            return Err(EngineError::Internal("flow decomposition came up short".into()));
        }

        // Crossings of the string: edge-disjoint b0 -> bl paths inside it.
        let s_edges: Vec<(u32, u32)> = s
            .blocks
            .iter()
            .flat_map(|&b| self.bt.blocks[b].edges.iter().copied())
            .collect();
        let mut snet = FlowNet::new(n);
        for &(x, y) in &s_edges {
            snet.add_undirected_unit(x as usize, y as usize);
        }
        let f = snet.max_flow(b0 as usize, bl as usize, count as i64);
        if f < count as i64 {
            return Err(EngineError::Internal("string lost its internal connectivity".into()));
        }
        let crossings: Vec<Vec<u32>> = snet
            .decompose_paths(b0 as usize, bl as usize)
            .into_iter()
            .map(|p| p.into_iter().map(|v| v as u32).collect())
            .collect();
        if crossings.len() < count {
            return Err(EngineError::Internal("crossing decomposition came up short".into()));
        }

        let mut cycles: Vec<Cycle> = Vec::new();
        for i in 0..count {
            let mut vs = legs0[i].clone(); // z .. b0
            vs.extend(crossings[i].iter().skip(1)); // .. bl
            let back = &legs1[i];
            vs.extend(back[1..back.len() - 1].iter().rev());
            let c = Cycle::new(g, vs)?;
            // Every cycle must pass every cutvertex of the string.
            for &b in &s.cuts {
                if !c.contains_vertex(b) {
                    return Err(EngineError::Internal(
                        "crossing skipped a string cutvertex".into(),
                    ));
                }
            }
            cycles.push(c);
        }

        // Shortcut: a labeled cutvertex lies on every cycle, so pairs give
        // even A-cycles immediately.
        if let Some(&a) = s.cuts.iter().find(|&&c| g.is_a(c)) {
            let mut out = Vec::new();
            for t in 0..k {
                out.push(even_cycle_from_pair_sharing_label(
                    g,
                    &cycles[2 * t],
                    &cycles[2 * t + 1],
                    a,
                )?);
            }
            return Ok(out);
        }

        // Pick 2k interior labels in distinct blocks.
        let mut chosen: Vec<(usize, u32)> = Vec::new(); // (string position, label)
        for (pos, &b) in s.blocks.iter().enumerate() {
            if chosen.len() == 2 * k {
                break;
            }
            let cuts = &self.bt.block_cuts[b];
            if let Some(a) = self.bt.blocks[b]
                .vertices
                .iter()
                .copied()
                .filter(|v| g.is_a(*v) && !cuts.contains(v))
                .min()
            {
                chosen.push((pos, a));
            }
        }
        if chosen.len() < 2 * k {
            return Err(EngineError::Internal("too few interior labels in the string".into()));
        }

        // Repair until every chosen label sits on its own cycle.
        let mut slots: Vec<Option<Cycle>> = cycles.into_iter().map(Some).collect();
        let mut assigned: Vec<usize> = Vec::new(); // slot index per chosen label
        let chosen_labels: BTreeSet<u32> = chosen.iter().map(|&(_, a)| a).collect();
        for &(pos, a) in &chosen {
            let b = s.blocks[pos];
            let b_prev = s.cuts[pos];
            let b_next = s.cuts[pos + 1];
            let holders: Vec<usize> = slots
                .iter()
                .enumerate()
                .filter(|(_, c)| c.as_ref().is_some_and(|c| c.contains_vertex(a)))
                .map(|(i, _)| i)
                .collect();
            if holders.len() > 1 {
                return Err(EngineError::Internal(
                    "label of block degree two on several cycles".into(),
                ));
            }
            let mut holder = holders.first().copied();
            if holder.is_none() {
                holder = Some(self.reroute_through_label(
                    &mut slots, &s, pos, a, b, b_prev, b_next, &chosen_labels,
                )?);
            }
            let mut hi = holder.unwrap();
            if assigned.contains(&hi) {
                // Swap crossings with a free cycle so the label moves there.
                let free = slots
                    .iter()
                    .enumerate()
                    .find(|(i, c)| {
                        !assigned.contains(i)
                            && c.as_ref().is_some_and(|c| {
                                !chosen_labels.iter().any(|&x| c.contains_vertex(x))
                            })
                    })
                    .map(|(i, _)| i)
                    .ok_or_else(|| {
                        EngineError::Internal("no free cycle left for the swap".into())
                    })?;
                let ca = crossing_of(slots[hi].as_ref().unwrap(), &s_vertices, b_prev, b_next);
                let cd = crossing_of(slots[free].as_ref().unwrap(), &s_vertices, b_prev, b_next);
                let new_a = replace_crossing(g, slots[hi].as_ref().unwrap(), &cd, &s_vertices)?;
                let new_d = replace_crossing(g, slots[free].as_ref().unwrap(), &ca, &s_vertices)?;
                slots[hi] = Some(new_a);
                slots[free] = Some(new_d);
                hi = free;
            }
            assigned.push(hi);
        }

        // Pair the assigned cycles and pull one even A-cycle from each pair.
        let mut out = Vec::new();
        for t in 0..k {
            let c1 = slots[assigned[2 * t]].as_ref().unwrap();
            let c2 = slots[assigned[2 * t + 1]].as_ref().unwrap();
            let a2 = chosen[2 * t + 1].1;
            let ear = ear_through(c2, a2, c1);
            let theta = theta_from_cycle_and_path(g, c1, &ear)?;
            out.push(even_a_cycle_from_theta(g, &theta, g.a_set())?);
        }
        Ok(out)
    }

    /// The repair step: build a path through an off-cycle label between two
    /// cycles, splice it in with the three-vertex path primitive, and manage
    /// the slot bookkeeping.
    #[allow(clippy::too_many_arguments)]
    fn reroute_through_label(
        &self,
        slots: &mut Vec<Option<Cycle>>,
        s: &StringPath,
        pos: usize,
        a: u32,
        b: usize,
        b_prev: u32,
        b_next: u32,
        chosen_labels: &BTreeSet<u32>,
    ) -> Result<usize, EngineError> {
        let g = &self.g;
        let block = &self.bt.blocks[b];
        let bg = self.block_graph(b);
        let s_vertices: BTreeSet<u32> = s
            .blocks
            .iter()
            .flat_map(|&bb| self.bt.blocks[bb].vertices.iter().copied())
            .collect();
        let cycle_edges: BTreeSet<(u32, u32)> = slots
            .iter()
            .flatten()
            .flat_map(|c| c.edge_set())
            .collect();
        let cycle_vs: BTreeSet<u32> = slots
            .iter()
            .flatten()
            .flat_map(|c| c.vertices().iter().copied())
            .collect();
        let targets: BTreeSet<u32> = block
            .vertices
            .iter()
            .copied()
            .filter(|v| cycle_vs.contains(v))
            .collect();
        let nbrs = bg.neighbors(a);
        if nbrs.len() != 2 {
            return Err(EngineError::Internal("interior label degree differs from two".into()));
        }
        let (u, v) = (nbrs[0], nbrs[1]);

        // Two vertex-disjoint escapes from {u, v} to the cycles, inside the
        // block, avoiding the label and all cycle edges.
        let n = g.n();
        let (src, snk) = (2 * n, 2 * n + 1);
        let mut net = FlowNet::new(2 * n + 2);
        let in_of = |x: u32| 2 * x as usize;
        let out_of = |x: u32| 2 * x as usize + 1;
        for &w in &block.vertices {
            if w == a {
                continue;
            }
            net.add_arc(in_of(w), out_of(w), 1);
            if targets.contains(&w) {
                net.add_arc(out_of(w), snk, 1);
            }
        }
        net.add_arc(src, in_of(u), 1);
        net.add_arc(src, in_of(v), 1);
        for &(x, y) in &block.edges {
            if x == a || y == a || cycle_edges.contains(&edge(x, y)) {
                continue;
            }
            net.add_arc(out_of(x), in_of(y), 1);
            net.add_arc(out_of(y), in_of(x), 1);
        }
        if net.max_flow(src, snk, 2) < 2 {
            return Err(EngineError::Internal(
                "label cannot reach two cycles disjointly".into(),
            ));
        }
        let mut halves: Vec<Vec<u32>> = net
            .decompose_paths(src, snk)
            .into_iter()
            .map(|np| {
                let mut vs: Vec<u32> = Vec::new();
                for &node in &np[1..np.len() - 1] {
                    let w = (node / 2) as u32;
                    if vs.last() != Some(&w) {
                        vs.push(w);
                    }
                }
                vs
            })
            .collect();
        // Order the halves as (through u, through v).
        if halves[0][0] != u {
            halves.swap(0, 1);
        }
        let (hu, hv) = (halves[0].clone(), halves[1].clone());
        let mut path: Vec<u32> = hu.iter().rev().copied().collect();
        path.push(a);
        path.extend(hv.iter());
        let x = path[0];
        let y = *path.last().unwrap();

        let owner = |vv: u32| -> usize {
            slots
                .iter()
                .position(|c| c.as_ref().is_some_and(|c| c.contains_vertex(vv)))
                .expect("target lies on a cycle")
        };
        let ci = owner(x);
        let cj = owner(y);

        // Splice: a path from one cut to the other through the label, inside
        // the union of the two crossings and the new path.
        let cross_i = crossing_of(slots[ci].as_ref().unwrap(), &s_vertices, b_prev, b_next);
        let cross_j = crossing_of(slots[cj].as_ref().unwrap(), &s_vertices, b_prev, b_next);
        let mut h_edges: BTreeSet<(u32, u32)> = BTreeSet::new();
        for w in cross_i.windows(2).chain(cross_j.windows(2)).chain(path.windows(2)) {
            h_edges.insert(edge(w[0], w[1]));
        }
        let hb = LabeledGraph::new(g.n(), h_edges.iter().copied(), [], None)?;
        let r = match abc_path(&hb, b_prev, a, b_next)? {
            AbcOutcome::Path(r) => r,
            AbcOutcome::Separator(_) => {
                return Err(EngineError::Internal(
                    "no through-path for the label inside the patch".into(),
                ))
            }
        };
        let rebuilt = replace_crossing(g, slots[ci].as_ref().unwrap(), &r, &s_vertices)?;

        if ci == cj {
            slots[ci] = Some(rebuilt);
            return Ok(ci);
        }
        let cj_holds_chosen =
            chosen_labels.iter().any(|&x| slots[cj].as_ref().unwrap().contains_vertex(x));
        if !cj_holds_chosen {
            slots[cj] = None;
            slots[ci] = Some(rebuilt);
            Ok(ci)
        } else {
            // Donate a crossing from a fully free cycle to repair cj.
            let free = slots
                .iter()
                .enumerate()
                .find(|(i, c)| {
                    *i != ci
                        && *i != cj
                        && c.as_ref().is_some_and(|c| {
                            !chosen_labels.iter().any(|&x| c.contains_vertex(x))
                        })
                })
                .map(|(i, _)| i)
                .ok_or_else(|| EngineError::Internal("no donor cycle left".into()))?;
            let donor_cross =
                crossing_of(slots[free].as_ref().unwrap(), &s_vertices, b_prev, b_next);
            let repaired_j =
                replace_crossing(g, slots[cj].as_ref().unwrap(), &donor_cross, &s_vertices)?;
            slots[cj] = Some(repaired_j);
            slots[free] = None;
            slots[ci] = Some(rebuilt);
            Ok(ci)
        }
    }

    /// Oracle fallback: exact minimum cover of the string-heavy even
    /// A-cycles.
    fn oracle_string_cover(
        &self,
        s: &StringPath,
        budget: &OracleBudget,
    ) -> Result<Vec<(u32, u32)>, EngineError> {
        let g = &self.g;
        let heavy_edges: BTreeSet<(u32, u32)> = s
            .blocks
            .iter()
            .flat_map(|&b| self.bt.blocks[b].edges.iter().copied())
            .filter(|&(x, y)| g.is_a(x) || g.is_a(y))
            .collect();
        let all = enumerate_cycles(g, &CyclePredicate::even_a(), Some(budget.max_cycles), budget.max_nodes)
            .map_err(|e| oracle::OracleError::Budget(e.to_string()))?;
        let heavy: Vec<&Cycle> = all
            .iter()
            .filter(|c| c.edge_set().iter().any(|e| heavy_edges.contains(e)))
            .collect();
        let edge_ids: BTreeMap<(u32, u32), usize> =
            g.edges().iter().copied().enumerate().map(|(i, e)| (e, i)).collect();
        let words = g.edge_count().div_ceil(64).max(1);
        let masks: Vec<Vec<u64>> = heavy
            .iter()
            .map(|c| {
                let mut m = oracle::empty_mask(words);
                for e in c.edge_set() {
                    oracle::set_bit(&mut m, edge_ids[&e]);
                }
                m
            })
            .collect();
        let ids = oracle::min_hitting_over_masks(&masks, g.edge_count(), words, budget)?;
        Ok(ids.into_iter().map(|i| g.edges()[i]).collect())
    }
}

// ---------------------------------------------------------------------------
// String discovery
// ---------------------------------------------------------------------------

fn find_strings_impl(g: &LabeledGraph, z: u32, bt: &BlockTree) -> Vec<StringPath> {
    let n_blocks = bt.blocks.len();
    let block_eligible = |b: usize| -> bool {
        bt.degree(BtNode::Block(b)) == 2
            && bt.blocks[b].vertices.iter().all(|&v| !g.has_edge(v, z))
    };
    let cut_eligible = |c: u32| bt.degree(BtNode::Cut(c)) == 2;
    let eligible = |node: BtNode| match node {
        BtNode::Block(b) => block_eligible(b),
        BtNode::Cut(c) => cut_eligible(c),
    };

    // Connected components of the eligible part of the block tree; each is a
    // path since eligible nodes have degree two in the whole tree.
    let mut visited: BTreeSet<BtNode> = BTreeSet::new();
    let mut strings = Vec::new();
    let mut all_nodes: Vec<BtNode> = (0..n_blocks).map(BtNode::Block).collect();
    all_nodes.extend(bt.cutvertices.iter().map(|&c| BtNode::Cut(c)));
    for &start in &all_nodes {
        if visited.contains(&start) || !eligible(start) {
            continue;
        }
        // Gather the component.
        let mut comp = vec![start];
        visited.insert(start);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for w in bt.neighbors(u) {
                if eligible(w) && visited.insert(w) {
                    comp.push(w);
                    stack.push(w);
                }
            }
        }
        // Order the component as a path from its smallest endpoint.
        let deg_in = |u: BtNode| -> usize {
            bt.neighbors(u).into_iter().filter(|w| comp.contains(w)).count()
        };
        let mut endpoints: Vec<BtNode> =
            comp.iter().copied().filter(|&u| deg_in(u) <= 1).collect();
        endpoints.sort();
        let first = endpoints.first().copied().unwrap_or(comp[0]);
        let mut path = vec![first];
        let mut prev: Option<BtNode> = None;
        let mut cur = first;
        loop {
            let next = bt
                .neighbors(cur)
                .into_iter()
                .find(|&w| comp.contains(&w) && Some(w) != prev);
            match next {
                Some(w) => {
                    path.push(w);
                    prev = Some(cur);
                    cur = w;
                }
                None => break,
            }
        }
        // Valid string: from the first A-block with a cut before it to the
        // last A-block with a cut after it, flanks included.
        let is_a_block = |node: BtNode| -> bool {
            matches!(node, BtNode::Block(b) if bt.blocks[b].vertices.iter().any(|&v| g.is_a(v)))
        };
        let p = (0..path.len()).find(|&i| i >= 1 && is_a_block(path[i]));
        let q = (0..path.len()).rev().find(|&i| i + 1 < path.len() && is_a_block(path[i]));
        let (Some(p), Some(q)) = (p, q) else { continue };
        if p > q {
            continue;
        }
        let mut cuts = Vec::new();
        let mut blocks = Vec::new();
        for node in &path[p - 1..=q + 1] {
            match *node {
                BtNode::Cut(c) => cuts.push(c),
                BtNode::Block(b) => blocks.push(b),
            }
        }
        debug_assert_eq!(cuts.len(), blocks.len() + 1);
        strings.push(StringPath { cuts, blocks });
    }
    strings.sort_by_key(|s| s.cuts[0]);
    strings
}

/// Check the four defining conditions of a string against the state.
pub fn validate_string(
    g: &LabeledGraph,
    z: u32,
    bt: &BlockTree,
    s: &StringPath,
) -> Result<(), EngineError> {
    if s.blocks.is_empty() || s.cuts.len() != s.blocks.len() + 1 {
        return Err(EngineError::Internal("malformed string".into()));
    }
    for &b in &s.blocks {
        if bt.degree(BtNode::Block(b)) != 2 {
            return Err(EngineError::Internal("string block of wrong tree degree".into()));
        }
        for &v in &bt.blocks[b].vertices {
            if g.has_edge(v, z) {
                return Err(EngineError::Internal("string touches a neighbor of z".into()));
            }
        }
    }
    for &c in &s.cuts {
        if bt.degree(BtNode::Cut(c)) != 2 {
            return Err(EngineError::Internal("string cut of wrong tree degree".into()));
        }
    }
    let ends_meet_a = |b: usize| bt.blocks[b].vertices.iter().any(|&v| g.is_a(v));
    if !ends_meet_a(s.blocks[0]) || !ends_meet_a(*s.blocks.last().unwrap()) {
        return Err(EngineError::Internal("string end block misses A".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

/// BFS from `from` within `allowed`, stopping at the first vertex of
/// `targets` (targets are not expanded). Returns the path target-first.
pub(crate) fn bfs_to_targets(
    g: &LabeledGraph,
    from: u32,
    allowed: &BTreeSet<u32>,
    targets: &BTreeSet<u32>,
) -> Option<Vec<u32>> {
    if targets.contains(&from) {
        return Some(vec![from]);
    }
    let mut prev: BTreeMap<u32, u32> = BTreeMap::new();
    prev.insert(from, from);
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(from);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if prev.contains_key(&w) || !allowed.contains(&w) {
                continue;
            }
            prev.insert(w, u);
            if targets.contains(&w) {
                // Target-first: [target, .., from].
                let mut path = vec![w];
                let mut cur = u;
                loop {
                    path.push(cur);
                    if cur == from {
                        break;
                    }
                    cur = prev[&cur];
                }
                return Some(path);
            }
            queue.push_back(w);
        }
    }
    None
}

/// Path from a cutvertex of a block out through the hanging branch to `z`,
/// avoiding the block itself.
pub(crate) fn branch_path_to_z(
    g: &LabeledGraph,
    z: u32,
    block: &Block,
    w: u32,
) -> Result<Vec<u32>, EngineError> {
    let forbidden: BTreeSet<u32> =
        block.vertices.iter().copied().filter(|&v| v != w).collect();
    let path = g
        .bfs_path(w, z, |v| !forbidden.contains(&v))
        .ok_or_else(|| EngineError::Internal("cut branch cannot reach z".into()))?;
    Ok(path)
}

/// Path from a branching cutvertex down one of its off-path blocks to `z`,
/// avoiding every other block at that cutvertex.
pub(crate) fn branch_from_cut_to_z(
    pipe: &Pipeline,
    c: u32,
    via_block: usize,
) -> Result<Vec<u32>, EngineError> {
    let mut forbidden: BTreeSet<u32> = BTreeSet::new();
    if let Some(blocks) = pipe.bt.cut_blocks.get(&c) {
        for &b in blocks {
            if b != via_block {
                forbidden.extend(pipe.bt.blocks[b].vertices.iter().copied());
            }
        }
    }
    forbidden.remove(&c);
    pipe.g
        .bfs_path(c, pipe.z, |v| !forbidden.contains(&v))
        .ok_or_else(|| EngineError::Internal("cut branch cannot reach z".into()))
}

/// Arc of a cycle's canonical vertex list walking forward from index `from`
/// to index `to`, inclusive.
fn cycle_arc(cvs: &[u32], from: usize, to: usize) -> Vec<u32> {
    let mut out = Vec::new();
    let mut i = from;
    loop {
        out.push(cvs[i]);
        if i == to {
            break;
        }
        i = (i + 1) % cvs.len();
    }
    out
}

/// The portion of a cycle inside the string between the two cuts, oriented
/// from `b_prev` to `b_next`.
fn crossing_of(c: &Cycle, s_vertices: &BTreeSet<u32>, b_prev: u32, b_next: u32) -> Vec<u32> {
    let vs = c.vertices();
    let pp = vs.iter().position(|&v| v == b_prev).expect("cycle passes the cut");
    let pn = vs.iter().position(|&v| v == b_next).expect("cycle passes the cut");
    let fwd = cycle_arc(vs, pp, pn);
    if fwd.iter().all(|v| s_vertices.contains(v)) {
        return fwd;
    }
    let mut bwd = cycle_arc(vs, pn, pp);
    bwd.reverse();
    debug_assert!(bwd.iter().all(|v| s_vertices.contains(v)));
    bwd
}

/// Replace the string-side portion of a cycle between the replacement's end
/// cuts with the replacement path.
fn replace_crossing(
    g: &LabeledGraph,
    c: &Cycle,
    replacement: &[u32],
    s_vertices: &BTreeSet<u32>,
) -> Result<Cycle, EngineError> {
    let b_prev = replacement[0];
    let b_next = *replacement.last().unwrap();
    let vs = c.vertices();
    let pp = vs.iter().position(|&v| v == b_prev).expect("cycle passes the cut");
    let pn = vs.iter().position(|&v| v == b_next).expect("cycle passes the cut");
    // The outside arc runs from b_next around (through z) back to b_prev.
    let fwd = cycle_arc(vs, pp, pn);
    let outside = if fwd.iter().all(|v| s_vertices.contains(v)) {
        cycle_arc(vs, pn, pp)
    } else {
        let mut rev = cycle_arc(vs, pp, pn);
        rev.reverse();
        rev
    };
    // outside: b_next .. b_prev. New cycle: replacement + outside interior.
    let mut new_vs = replacement.to_vec();
    new_vs.extend(outside[1..outside.len() - 1].iter().copied());
    Ok(Cycle::new(g, new_vs)?)
}

/// Walk `host` from `a` in one direction to its first contact with `other`;
/// the resulting ear, together with `other`, carries a theta.
fn ear_through(host: &Cycle, a: u32, other: &Cycle) -> Vec<u32> {
    let vs = host.vertices();
    let pos = vs.iter().position(|&v| v == a).expect("label on host cycle");
    let on_other: BTreeSet<u32> = other.vertices().iter().copied().collect();
    let len = vs.len();
    let mut fwd = vec![a];
    let mut i = (pos + 1) % len;
    while !on_other.contains(&vs[i]) {
        fwd.push(vs[i]);
        i = (i + 1) % len;
    }
    fwd.push(vs[i]);
    let mut bwd = Vec::new();
    let mut i = (pos + len - 1) % len;
    while !on_other.contains(&vs[i]) {
        bwd.push(vs[i]);
        i = (i + len - 1) % len;
    }
    bwd.push(vs[i]);
    // Ear: first contact backward, through a, to first contact forward.
    let mut ear: Vec<u32> = bwd.into_iter().rev().collect();
    ear.extend(fwd);
    ear
}

/// Even A-cycle inside the union of two edge-disjoint cycles that share the
/// labeled vertex `a`.
fn even_cycle_from_pair_sharing_label(
    g: &LabeledGraph,
    c1: &Cycle,
    c2: &Cycle,
    a: u32,
) -> Result<Cycle, EngineError> {
    if c1.is_even() {
        return Ok(c1.clone());
    }
    if c2.is_even() {
        return Ok(c2.clone());
    }
    // Both odd: walk c2 from a to its first other contact with c1; the two
    // a-to-contact arcs of c1 have opposite parities.
    let vs = c2.vertices();
    let pos = vs.iter().position(|&v| v == a).expect("shared label");
    let on_c1: BTreeSet<u32> = c1.vertices().iter().copied().collect();
    let len = vs.len();
    let mut p = vec![a];
    let mut i = (pos + 1) % len;
    while !(on_c1.contains(&vs[i]) && vs[i] != a) {
        p.push(vs[i]);
        i = (i + 1) % len;
    }
    p.push(vs[i]);
    let x = vs[i];
    let c1vs = c1.vertices();
    let pa = c1vs.iter().position(|&v| v == a).unwrap();
    let px = c1vs.iter().position(|&v| v == x).unwrap();
    let arc1 = cycle_arc(c1vs, pa, px);
    let mut arc2 = cycle_arc(c1vs, px, pa);
    arc2.reverse();
    let theta = ThetaWitness::new(g, a, x, [p, arc1, arc2])?;
    let a_set: BTreeSet<u32> = [a].into_iter().collect();
    // a is a branch vertex, so every union is an A-cycle.
    Ok(even_a_cycle_from_theta(g, &theta, &a_set)?)
}

/// Minimum edge cut of size at most `cap` between `src` and `dst` over the
/// vertices satisfying `keep`, if one exists.
fn small_edge_cut(
    g: &LabeledGraph,
    src: u32,
    dst: u32,
    keep: impl Fn(u32) -> bool,
    cap: usize,
) -> Option<Vec<(u32, u32)>> {
    if !keep(src) && src != dst {
        // Source outside the kept region: it is vacuously separated.
        return Some(Vec::new());
    }
    let mut net = FlowNet::new(g.n());
    let mut kept_edges = Vec::new();
    for &(x, y) in g.edges() {
        if keep(x) && keep(y) {
            net.add_undirected_unit(x as usize, y as usize);
            kept_edges.push((x, y));
        }
    }
    let f = net.max_flow(src as usize, dst as usize, cap as i64 + 1);
    if f > cap as i64 {
        return None;
    }
    let side = net.residual_reachable(src as usize);
    let cut: Vec<(u32, u32)> = kept_edges
        .into_iter()
        .filter(|&(x, y)| side[x as usize] != side[y as usize])
        .collect();
    debug_assert_eq!(cut.len() as i64, f);
    Some(cut)
}
