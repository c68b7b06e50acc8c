//! Exact desk-scale baselines: maximum edge-disjoint cycle packing, minimum
//! edge and vertex hitting sets, and certificate verification. These are the
//! ground truth every pipeline claim is checked against, so a budget overrun
//! is always an error, never a silently wrong answer.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::certificate::Certificate;
use crate::cycles::{enumerate_cycles, CyclePredicate};
use crate::graph::{Cycle, GraphError, LabeledGraph};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle budget exceeded: {0}")]
    Budget(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Search limits. Exceeding any cap aborts with [`OracleError::Budget`].
#[derive(Clone, Debug)]
pub struct OracleBudget {
    pub max_vertices: usize,
    pub max_cycles: usize,
    pub max_nodes: u64,
    /// Coarse wall-clock safety net; `None` keeps runs fully deterministic.
    pub time_cap: Option<Duration>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_vertices: 512,
            max_cycles: 1_000_000,
            max_nodes: 400_000_000,
            time_cap: None,
        }
    }
}

struct Clock {
    start: Instant,
    cap: Option<Duration>,
}

impl Clock {
    fn new(budget: &OracleBudget) -> Self {
        Self { start: Instant::now(), cap: budget.time_cap }
    }
    fn check(&self) -> Result<(), OracleError> {
        if let Some(cap) = self.cap {
            if self.start.elapsed() > cap {
                return Err(OracleError::Budget("time cap exceeded".into()));
            }
        }
        Ok(())
    }
}

// Edge subsets as bit masks over the host's canonical edge order.
pub(crate) type Mask = Vec<u64>;

pub(crate) fn empty_mask(words: usize) -> Mask {
    vec![0; words]
}

pub(crate) fn set_bit(mask: &mut Mask, i: usize) {
    mask[i / 64] |= 1 << (i % 64);
}

fn clear_bit(mask: &mut Mask, i: usize) {
    mask[i / 64] &= !(1 << (i % 64));
}

fn disjoint(a: &Mask, b: &Mask) -> bool {
    a.iter().zip(b).all(|(x, y)| x & y == 0)
}

fn or_into(acc: &mut Mask, b: &Mask) {
    for (x, y) in acc.iter_mut().zip(b) {
        *x |= y;
    }
}

fn popcount(a: &Mask) -> u32 {
    a.iter().map(|x| x.count_ones()).sum()
}

fn first_bit(a: &Mask) -> Option<usize> {
    for (w, &x) in a.iter().enumerate() {
        if x != 0 {
            return Some(w * 64 + x.trailing_zeros() as usize);
        }
    }
    None
}

fn test_bit(a: &Mask, i: usize) -> bool {
    a[i / 64] >> (i % 64) & 1 == 1
}

/// Cycle list with per-cycle edge masks, shared by the exact searches.
pub(crate) struct CycleArena {
    pub cycles: Vec<Cycle>,
    pub masks: Vec<Mask>,
    pub edge_ids: std::collections::BTreeMap<(u32, u32), usize>,
    pub words: usize,
}

impl CycleArena {
    pub fn build(
        g: &LabeledGraph,
        pred: &CyclePredicate,
        budget: &OracleBudget,
    ) -> Result<Self, OracleError> {
        if g.n() > budget.max_vertices {
            return Err(OracleError::Budget(format!(
                "{} vertices exceed the cap of {}",
                g.n(),
                budget.max_vertices
            )));
        }
        let cycles = enumerate_cycles(g, pred, Some(budget.max_cycles + 1), budget.max_nodes)
            .map_err(|e| match e {
                GraphError::Precondition(msg) => OracleError::Budget(msg),
                other => OracleError::Graph(other),
            })?;
        if cycles.len() > budget.max_cycles {
            return Err(OracleError::Budget(format!(
                "more than {} cycles",
                budget.max_cycles
            )));
        }
        let edge_ids: std::collections::BTreeMap<(u32, u32), usize> =
            g.edges().iter().copied().enumerate().map(|(i, e)| (e, i)).collect();
        let words = g.edge_count().div_ceil(64).max(1);
        let masks = cycles
            .iter()
            .map(|c| {
                let mut m = empty_mask(words);
                for e in c.edge_set() {
                    set_bit(&mut m, edge_ids[&e]);
                }
                m
            })
            .collect();
        Ok(Self { cycles, masks, edge_ids, words })
    }
}

/// Result of the exact packing search.
#[derive(Clone, Debug)]
pub struct PackingOutcome {
    /// `min(k_target, packing number)`; exact.
    pub count: usize,
    pub cycles: Vec<Cycle>,
}

/// Exact maximum edge-disjoint packing of predicate cycles, optionally
/// capped at `k_target`. Branch-and-bound over the canonical cycle list with
/// edge-conflict branching and a parity-aware upper bound.
pub fn max_edge_disjoint_packing(
    g: &LabeledGraph,
    pred: &CyclePredicate,
    k_target: Option<usize>,
    budget: &OracleBudget,
) -> Result<PackingOutcome, OracleError> {
    let arena = CycleArena::build(g, pred, budget)?;
    let mut ends = vec![(0u32, 0u32); g.edge_count()];
    for (&e, &i) in &arena.edge_ids {
        ends[i] = e;
    }
    let lens: Vec<usize> = arena.cycles.iter().map(|c| c.len()).collect();
    let pick = max_packing_over_masks(
        &arena.masks,
        &lens,
        &ends,
        g.n(),
        k_target.unwrap_or(usize::MAX),
        budget,
    )?;
    let cycles: Vec<Cycle> = pick.iter().map(|&i| arena.cycles[i].clone()).collect();
    Ok(PackingOutcome { count: cycles.len(), cycles })
}

/// Core packing search over pre-built edge masks; returns the indices of a
/// maximum (or `cap`-reaching) family of pairwise disjoint masks.
pub(crate) fn max_packing_over_masks(
    masks: &[Mask],
    lens: &[usize],
    ends: &[(u32, u32)],
    n: usize,
    cap: usize,
    budget: &OracleBudget,
) -> Result<Vec<usize>, OracleError> {
    if cap == 0 || masks.is_empty() {
        return Ok(Vec::new());
    }
    if cap == 2 {
        // Disjoint-pair existence via a transposed incidence bitmap: for
        // each cycle, the union of per-edge cycle sets over its edges is
        // exactly its conflict set.
        let ground = masks[0].len() * 64;
        let cwords = masks.len().div_ceil(64);
        let mut by_edge = vec![vec![0u64; cwords]; ground];
        for (ci, m) in masks.iter().enumerate() {
            for (w, &word) in m.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    by_edge[w * 64 + b][ci / 64] |= 1 << (ci % 64);
                    bits &= bits - 1;
                }
            }
        }
        let mut conflicts = vec![0u64; cwords];
        for (ci, m) in masks.iter().enumerate() {
            for c in conflicts.iter_mut() {
                *c = 0;
            }
            for (w, &word) in m.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    for (acc, &src) in conflicts.iter_mut().zip(&by_edge[w * 64 + b]) {
                        *acc |= src;
                    }
                    bits &= bits - 1;
                }
            }
            // First cycle after ci not in conflict with it.
            for w in ci / 64..cwords {
                let mut free = !conflicts[w];
                if w == ci / 64 {
                    free &= !((1u64 << (ci % 64)) - 1) & !(1 << (ci % 64));
                }
                if w == cwords - 1 && masks.len() % 64 != 0 {
                    free &= (1u64 << (masks.len() % 64)) - 1;
                }
                if free != 0 {
                    let cj = w * 64 + free.trailing_zeros() as usize;
                    return Ok(vec![ci, cj]);
                }
            }
        }
        return Ok(vec![0]); // nonempty list, no disjoint pair
    }
    let clock = Clock::new(budget);
    let words = masks[0].len();

    struct Search<'a> {
        masks: &'a [Mask],
        lens: &'a [usize],
        ends: &'a [(u32, u32)],
        n: usize,
        words: usize,
        cap: usize,
        best: usize,
        best_pick: Vec<usize>,
        nodes: u64,
        max_nodes: u64,
        clock: &'a Clock,
    }

    impl Search<'_> {
        /// Upper bound on how many more cycles fit. Cycles have even degree
        /// at every vertex, so each odd-degree vertex of the live edge union
        /// strands at least one edge; stranded edges pair up.
        fn bound(&self, alive: &[usize]) -> usize {
            if alive.is_empty() {
                return 0;
            }
            let mut union = empty_mask(self.words);
            let mut min_len = usize::MAX;
            for &i in alive {
                or_into(&mut union, &self.masks[i]);
                min_len = min_len.min(self.lens[i]);
            }
            let mut deg = vec![0u32; self.n];
            for i in 0..self.ends.len() {
                if test_bit(&union, i) {
                    deg[self.ends[i].0 as usize] += 1;
                    deg[self.ends[i].1 as usize] += 1;
                }
            }
            let odd = deg.iter().filter(|&&d| d % 2 == 1).count();
            let usable = popcount(&union) as usize - odd.div_ceil(2);
            usable / min_len.max(1)
        }

        fn run(&mut self, alive: &[usize], chosen: &mut Vec<usize>) -> Result<bool, OracleError> {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(OracleError::Budget("packing search node cap".into()));
            }
            if self.nodes % (1 << 14) == 0 {
                self.clock.check()?;
            }
            if chosen.len() > self.best {
                self.best = chosen.len();
                self.best_pick = chosen.clone();
            }
            if self.best >= self.cap {
                return Ok(true);
            }
            if alive.is_empty() {
                return Ok(false);
            }
            // One more cycle reaches the cap: anything alive is disjoint
            // from every chosen cycle by construction.
            if chosen.len() + 1 >= self.cap {
                chosen.push(alive[0]);
                self.best = chosen.len();
                self.best_pick = chosen.clone();
                chosen.pop();
                return Ok(true);
            }
            if chosen.len() + self.bound(alive) <= self.best {
                return Ok(false);
            }
            // Branch on the live edge covered by the fewest cycles: either
            // one of those cycles is in the packing, or the edge is unused.
            let mut counts = vec![0u32; self.ends.len()];
            for &i in alive {
                for (w, &word) in self.masks[i].iter().enumerate() {
                    let mut bits = word;
                    while bits != 0 {
                        let b = bits.trailing_zeros() as usize;
                        counts[w * 64 + b] += 1;
                        bits &= bits - 1;
                    }
                }
            }
            let e = (0..counts.len())
                .filter(|&e| counts[e] > 0)
                .min_by_key(|&e| (counts[e], e))
                .expect("live edge exists");
            for &i in alive {
                if !test_bit(&self.masks[i], e) {
                    continue;
                }
                let next: Vec<usize> = alive
                    .iter()
                    .copied()
                    .filter(|&j| disjoint(&self.masks[j], &self.masks[i]))
                    .collect();
                chosen.push(i);
                let done = self.run(&next, chosen)?;
                chosen.pop();
                if done {
                    return Ok(true);
                }
            }
            let without: Vec<usize> = alive
                .iter()
                .copied()
                .filter(|&j| !test_bit(&self.masks[j], e))
                .collect();
            self.run(&without, chosen)
        }
    }

    let mut search = Search {
        masks,
        lens,
        ends,
        n,
        words,
        cap,
        best: 0,
        best_pick: Vec::new(),
        nodes: 0,
        max_nodes: budget.max_nodes,
        clock: &clock,
    };
    let all: Vec<usize> = (0..masks.len()).collect();
    let mut chosen = Vec::new();
    search.run(&all, &mut chosen)?;
    Ok(search.best_pick)
}

/// Exact minimum-cardinality edge set meeting every predicate cycle;
/// deterministic tie-breaks by edge order.
pub fn min_edge_hitting_set(
    g: &LabeledGraph,
    pred: &CyclePredicate,
    budget: &OracleBudget,
) -> Result<Vec<(u32, u32)>, OracleError> {
    let arena = CycleArena::build(g, pred, budget)?;
    let ids = min_hitting_over_masks(&arena.masks, g.edge_count(), arena.words, budget)?;
    Ok(ids.into_iter().map(|i| g.edges()[i]).collect())
}

/// Exact minimum-cardinality vertex set meeting every predicate cycle.
pub fn min_vertex_hitting_set(
    g: &LabeledGraph,
    pred: &CyclePredicate,
    budget: &OracleBudget,
) -> Result<Vec<u32>, OracleError> {
    let arena = CycleArena::build(g, pred, budget)?;
    let words = g.n().div_ceil(64).max(1);
    let masks: Vec<Mask> = arena
        .cycles
        .iter()
        .map(|c| {
            let mut m = empty_mask(words);
            for &v in c.vertices() {
                set_bit(&mut m, v as usize);
            }
            m
        })
        .collect();
    let ids = min_hitting_over_masks(&masks, g.n(), words, budget)?;
    Ok(ids.into_iter().map(|i| i as u32).collect())
}

/// Exact minimum hitting set over arbitrary ground-element masks, reused by
/// the engine for restricted cycle families. Returns sorted element ids.
pub(crate) fn min_hitting_over_masks(
    masks: &[Mask],
    ground: usize,
    words: usize,
    budget: &OracleBudget,
) -> Result<Vec<usize>, OracleError> {
    if masks.is_empty() {
        return Ok(Vec::new());
    }
    let clock = Clock::new(budget);

    // Greedy cover for the initial upper bound.
    let greedy: Vec<usize> = {
        let mut chosen = Vec::new();
        let mut uncovered: Vec<usize> = (0..masks.len()).collect();
        while !uncovered.is_empty() {
            let mut count = vec![0usize; ground];
            for &ci in &uncovered {
                for b in 0..ground {
                    if test_bit(&masks[ci], b) {
                        count[b] += 1;
                    }
                }
            }
            let e = (0..ground).max_by_key(|&b| (count[b], ground - b)).unwrap();
            chosen.push(e);
            uncovered.retain(|&ci| !test_bit(&masks[ci], e));
        }
        chosen
    };

    struct Search<'a> {
        masks: &'a [Mask],
        best: Vec<usize>,
        nodes: u64,
        max_nodes: u64,
        words: usize,
    }

    impl Search<'_> {
        /// Lower bound: greedily collected pairwise disjoint uncovered
        /// cycles each need their own element.
        fn lower_bound(&self, uncovered: &[usize]) -> usize {
            let mut used = empty_mask(self.words);
            let mut lb = 0;
            for &ci in uncovered {
                if disjoint(&self.masks[ci], &used) {
                    or_into(&mut used, &self.masks[ci]);
                    lb += 1;
                }
            }
            lb
        }

        fn run(
            &mut self,
            uncovered: &[usize],
            chosen: &mut Vec<usize>,
            forbidden: &mut Mask,
            clock: &Clock,
        ) -> Result<(), OracleError> {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(OracleError::Budget("hitting-set search node cap".into()));
            }
            if self.nodes % (1 << 16) == 0 {
                clock.check()?;
            }
            if uncovered.is_empty() {
                if chosen.len() < self.best.len() {
                    self.best = chosen.clone();
                    self.best.sort_unstable();
                }
                return Ok(());
            }
            if chosen.len() + self.lower_bound(uncovered) >= self.best.len() {
                return Ok(());
            }
            // Branch on the uncovered cycle with the fewest allowed elements.
            let mut pick = uncovered[0];
            let mut pick_size = u32::MAX;
            for &ci in uncovered {
                let mut size = 0;
                for (w, &x) in self.masks[ci].iter().enumerate() {
                    size += (x & !forbidden[w]).count_ones();
                }
                if size < pick_size {
                    pick_size = size;
                    pick = ci;
                }
            }
            if pick_size == 0 {
                return Ok(()); // some cycle has no allowed element left
            }
            let elems: Vec<usize> = (0..self.words * 64)
                .filter(|&b| test_bit(&self.masks[pick], b) && !test_bit(forbidden, b))
                .collect();
            let mut locally_forbidden: Vec<usize> = Vec::new();
            for e in elems {
                let next: Vec<usize> = uncovered
                    .iter()
                    .copied()
                    .filter(|&ci| !test_bit(&self.masks[ci], e))
                    .collect();
                chosen.push(e);
                self.run(&next, chosen, forbidden, clock)?;
                chosen.pop();
                // Later branches may not use e; restore on the way out.
                set_bit(forbidden, e);
                locally_forbidden.push(e);
            }
            for e in locally_forbidden {
                clear_bit(forbidden, e);
            }
            Ok(())
        }
    }

    let mut search = Search {
        masks,
        best: greedy,
        nodes: 0,
        max_nodes: budget.max_nodes,
        words,
    };
    let all: Vec<usize> = (0..masks.len()).collect();
    let mut chosen = Vec::new();
    let mut forbidden = empty_mask(words);
    search.run(&all, &mut chosen, &mut forbidden, &clock)?;
    let mut out = search.best;
    out.sort_unstable();
    Ok(out)
}

/// Verification report; `pass` is authoritative, `failures` explain.
#[derive(Clone, Debug, serde::Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub failures: Vec<String>,
    pub counterexample: Option<Cycle>,
}

/// Check a certificate against the graph from first principles; provenance
/// tags are never trusted.
pub fn verify_certificate(
    g: &LabeledGraph,
    k: usize,
    cert: &Certificate,
    budget: &OracleBudget,
) -> Result<VerifyReport, OracleError> {
    let mut failures = Vec::new();
    let mut counterexample = None;
    match cert {
        Certificate::Packing { k: ck, cycles, .. } => {
            if *ck != k {
                failures.push(format!("certificate k = {ck}, expected {k}"));
            }
            if cycles.len() != *ck {
                failures.push(format!("{} cycles for k = {ck}", cycles.len()));
            }
            let mut used: BTreeSet<(u32, u32)> = BTreeSet::new();
            for (i, c) in cycles.iter().enumerate() {
                if let Err(e) = Cycle::new(g, c.vertices().to_vec()) {
                    failures.push(format!("cycle {i} invalid: {e}"));
                    continue;
                }
                if !c.is_even() {
                    failures.push(format!("cycle {i} has odd length {}", c.len()));
                }
                if !c.meets(g.a_set()) {
                    failures.push(format!("cycle {i} misses A"));
                }
                for e in c.edge_set() {
                    if !used.insert(e) {
                        failures.push(format!("cycles share edge ({}, {})", e.0, e.1));
                    }
                }
            }
        }
        Certificate::HittingSet { k: ck, edges, .. } => {
            if *ck != k {
                failures.push(format!("certificate k = {ck}, expected {k}"));
            }
            let mut removal = BTreeSet::new();
            for &(u, v) in edges {
                if !g.has_edge(u, v) {
                    failures.push(format!("hitting edge ({u}, {v}) not in the graph"));
                } else {
                    removal.insert(crate::graph::edge(u, v));
                }
            }
            let remaining = g.without_edges(&removal);
            let survivors = enumerate_cycles(
                &remaining,
                &CyclePredicate::even_a(),
                Some(1),
                budget.max_nodes,
            )
            .map_err(|e| OracleError::Budget(e.to_string()))?;
            if let Some(c) = survivors.into_iter().next() {
                failures.push(format!("even A-cycle survives removal: {:?}", c.vertices()));
                counterexample = Some(c);
            }
        }
    }
    Ok(VerifyReport { pass: failures.is_empty(), failures, counterexample })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::Provenance;

    fn k4_with_a0() -> LabeledGraph {
        LabeledGraph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], [0], None).unwrap()
    }

    #[test]
    fn k4_even_a_packing_number_is_one() {
        let r = max_edge_disjoint_packing(
            &k4_with_a0(),
            &CyclePredicate::even_a(),
            None,
            &OracleBudget::default(),
        )
        .unwrap();
        assert_eq!(r.count, 1);
        assert_eq!(r.cycles.len(), 1);
        assert!(r.cycles[0].is_even());
    }

    #[test]
    fn two_disjoint_squares_pack_two() {
        let g = LabeledGraph::new(
            8,
            [(0, 1), (1, 2), (2, 3), (0, 3), (4, 5), (5, 6), (6, 7), (4, 7)],
            [0, 4],
            None,
        )
        .unwrap();
        let r = max_edge_disjoint_packing(
            &g,
            &CyclePredicate::even_a(),
            None,
            &OracleBudget::default(),
        )
        .unwrap();
        assert_eq!(r.count, 2);
    }

    #[test]
    fn triangle_has_no_even_packing() {
        let g = LabeledGraph::new(3, [(0, 1), (1, 2), (0, 2)], [0], None).unwrap();
        let pred = CyclePredicate { require_even: true, ..Default::default() };
        let r = max_edge_disjoint_packing(&g, &pred, None, &OracleBudget::default()).unwrap();
        assert_eq!(r.count, 0);
    }

    /// Exhaustive cross-check on the complete graph on four vertices: no
    /// single edge meets all three squares through vertex 0, two edges do.
    #[test]
    fn k4_min_edge_hitting_set_has_two_edges() {
        let g = k4_with_a0();
        let pred = CyclePredicate::even_a();
        let hs = min_edge_hitting_set(&g, &pred, &OracleBudget::default()).unwrap();
        assert_eq!(hs.len(), 2);
        for &e in g.edges() {
            let mut rm = BTreeSet::new();
            rm.insert(e);
            let rest = g.without_edges(&rm);
            let left = enumerate_cycles(&rest, &pred, Some(1), 1 << 20).unwrap();
            assert!(!left.is_empty(), "single edge {e:?} should not suffice");
        }
        let rm: BTreeSet<(u32, u32)> = hs.iter().copied().collect();
        let rest = g.without_edges(&rm);
        assert!(enumerate_cycles(&rest, &pred, Some(1), 1 << 20).unwrap().is_empty());
    }

    #[test]
    fn graph_without_target_cycles_needs_no_hitting() {
        let g = LabeledGraph::new(3, [(0, 1), (1, 2), (0, 2)], [0], None).unwrap();
        let hs =
            min_edge_hitting_set(&g, &CyclePredicate::even_a(), &OracleBudget::default()).unwrap();
        assert!(hs.is_empty());
    }

    #[test]
    fn single_square_is_hit_by_the_lexicographic_minimum() {
        let g = LabeledGraph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)], [1], None).unwrap();
        let hs =
            min_edge_hitting_set(&g, &CyclePredicate::even_a(), &OracleBudget::default()).unwrap();
        assert_eq!(hs, vec![(0, 1)]);
    }

    #[test]
    fn vertex_hitting_on_shared_squares() {
        let g = LabeledGraph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)], [0], None).unwrap();
        let vs =
            min_vertex_hitting_set(&g, &CyclePredicate::even_a(), &OracleBudget::default())
                .unwrap();
        assert_eq!(vs.len(), 1);
        // Two squares sharing one vertex that lies on both.
        let g2 = LabeledGraph::new(
            7,
            [(0, 1), (1, 2), (2, 3), (0, 3), (0, 4), (4, 5), (5, 6), (0, 6)],
            [2, 5],
            None,
        )
        .unwrap();
        let vs2 =
            min_vertex_hitting_set(&g2, &CyclePredicate::even_a(), &OracleBudget::default())
                .unwrap();
        assert_eq!(vs2, vec![0]);
    }

    #[test]
    fn verifier_accepts_good_and_rejects_tampered() {
        let g = LabeledGraph::new(
            8,
            [(0, 1), (1, 2), (2, 3), (0, 3), (4, 5), (5, 6), (6, 7), (4, 7)],
            [0, 4],
            None,
        )
        .unwrap();
        let good = Certificate::Packing {
            k: 2,
            cycles: vec![
                Cycle::new(&g, vec![0, 1, 2, 3]).unwrap(),
                Cycle::new(&g, vec![4, 5, 6, 7]).unwrap(),
            ],
            bound_claimed: 2,
        };
        let r = verify_certificate(&g, 2, &good, &OracleBudget::default()).unwrap();
        assert!(r.pass, "{:?}", r.failures);

        // A hitting set that misses one square.
        let bad = Certificate::HittingSet {
            k: 2,
            edges: vec![(0, 1)],
            provenance: vec![Provenance::Oracle],
            bound_claimed: 4,
        };
        let r = verify_certificate(&g, 2, &bad, &OracleBudget::default()).unwrap();
        assert!(!r.pass);
        assert!(r.counterexample.is_some());

        // A structurally broken cycle (repeated vertex pattern caught by
        // revalidation against the host).
        let broken = Certificate::Packing {
            k: 1,
            cycles: vec![Cycle::canonical(vec![0, 1, 5, 3])],
            bound_claimed: 1,
        };
        let r = verify_certificate(&g, 1, &broken, &OracleBudget::default()).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn weak_duality_on_random_small_graphs() {
        use crate::gen;
        for seed in 0..80u64 {
            let g0 = gen::gnp_connected(7, 0.45, seed);
            let a = gen::random_subset(7, 0.5, seed ^ 0xfeed);
            let g = g0.with_a(a).unwrap();
            let pred = CyclePredicate::even_a();
            let pack =
                max_edge_disjoint_packing(&g, &pred, None, &OracleBudget::default()).unwrap();
            let hit = min_edge_hitting_set(&g, &pred, &OracleBudget::default()).unwrap();
            assert!(pack.count <= hit.len(), "seed {seed}");
            let rm: BTreeSet<(u32, u32)> = hit.iter().copied().collect();
            let rest = g.without_edges(&rm);
            assert!(enumerate_cycles(&rest, &pred, Some(1), 1 << 22).unwrap().is_empty());
        }
    }

    #[test]
    fn adding_an_edge_never_shrinks_the_packing() {
        use crate::gen;
        for seed in 0..30u64 {
            let g0 = gen::gnp_connected(6, 0.5, seed);
            let a = gen::random_subset(6, 0.6, seed ^ 1);
            let g = g0.with_a(a.clone()).unwrap();
            let pred = CyclePredicate::even_a();
            let before =
                max_edge_disjoint_packing(&g, &pred, None, &OracleBudget::default()).unwrap();
            let mut added = None;
            'outer: for u in 0..6u32 {
                for v in u + 1..6 {
                    if !g.has_edge(u, v) {
                        added = Some((u, v));
                        break 'outer;
                    }
                }
            }
            let Some(e) = added else { continue };
            let mut edges = g.edges().to_vec();
            edges.push(e);
            let g2 = LabeledGraph::new(6, edges, a, None).unwrap();
            let after =
                max_edge_disjoint_packing(&g2, &pred, None, &OracleBudget::default()).unwrap();
            assert!(after.count >= before.count, "seed {seed}");
        }
    }
}
