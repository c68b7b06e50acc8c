//! Small deterministic max-flow used for Menger-style arguments: unit
//! vertex/edge capacities, BFS augmentation, shortest-path flow
//! decomposition. All adjacency is in insertion order, so identical inputs
//! produce identical flows.

#[derive(Clone)]
pub(crate) struct FlowNet {
    to: Vec<u32>,
    cap: Vec<i64>,
    orig: Vec<i64>,
    adj: Vec<Vec<u32>>,
}

impl FlowNet {
    pub fn new(nodes: usize) -> Self {
        Self { to: Vec::new(), cap: Vec::new(), orig: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    pub fn nodes(&self) -> usize {
        self.adj.len()
    }

    /// Directed arc with a zero-capacity residual twin. Returns the arc id.
    pub fn add_arc(&mut self, u: usize, v: usize, cap: i64) -> usize {
        let id = self.to.len();
        self.to.push(v as u32);
        self.cap.push(cap);
        self.orig.push(cap);
        self.adj[u].push(id as u32);
        self.to.push(u as u32);
        self.cap.push(0);
        self.orig.push(0);
        self.adj[v].push(id as u32 + 1);
        id
    }

    /// Undirected unit edge: two unit arcs acting as each other's residuals.
    pub fn add_undirected_unit(&mut self, u: usize, v: usize) -> usize {
        let id = self.to.len();
        self.to.push(v as u32);
        self.cap.push(1);
        self.orig.push(1);
        self.adj[u].push(id as u32);
        self.to.push(u as u32);
        self.cap.push(1);
        self.orig.push(1);
        self.adj[v].push(id as u32 + 1);
        id
    }

    pub fn flow_on(&self, arc: usize) -> i64 {
        self.orig[arc] - self.cap[arc]
    }

    /// Edmonds–Karp up to `limit` units.
    pub fn max_flow(&mut self, s: usize, t: usize, limit: i64) -> i64 {
        let mut total = 0i64;
        while total < limit {
            let mut pred: Vec<u32> = vec![u32::MAX; self.to.len().max(1)];
            let mut seen = vec![false; self.adj.len()];
            seen[s] = true;
            let mut queue = std::collections::VecDeque::new();
            queue.push_back(s);
            'bfs: while let Some(u) = queue.pop_front() {
                for &aid in &self.adj[u] {
                    let aid = aid as usize;
                    let v = self.to[aid] as usize;
                    if self.cap[aid] > 0 && !seen[v] {
                        seen[v] = true;
                        pred[v] = aid as u32;
                        if v == t {
                            break 'bfs;
                        }
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                break;
            }
            // Unit augment along the predecessor chain.
            let mut bottleneck = i64::MAX;
            let mut v = t;
            while v != s {
                let aid = pred[v] as usize;
                bottleneck = bottleneck.min(self.cap[aid]);
                v = self.to[aid ^ 1] as usize;
            }
            bottleneck = bottleneck.min(limit - total);
            let mut v = t;
            while v != s {
                let aid = pred[v] as usize;
                self.cap[aid] -= bottleneck;
                self.cap[aid ^ 1] += bottleneck;
                v = self.to[aid ^ 1] as usize;
            }
            total += bottleneck;
        }
        total
    }

    /// Nodes reachable from `s` in the residual graph (min-cut side).
    pub fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &aid in &self.adj[u] {
                let aid = aid as usize;
                let v = self.to[aid] as usize;
                if self.cap[aid] > 0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Decompose the current flow into `s`-to-`t` node paths by repeated
    /// shortest-path extraction over flow-carrying arcs. Flow cycles, if any,
    /// are left behind.
    pub fn decompose_paths(&mut self, s: usize, t: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        loop {
            let mut pred: Vec<u32> = vec![u32::MAX; self.to.len().max(1)];
            let mut seen = vec![false; self.adj.len()];
            seen[s] = true;
            let mut queue = std::collections::VecDeque::new();
            queue.push_back(s);
            'bfs: while let Some(u) = queue.pop_front() {
                for &aid in &self.adj[u] {
                    let aid = aid as usize;
                    // Arc currently carries net flow away from u.
                    if self.flow_on(aid) > 0 {
                        let v = self.to[aid] as usize;
                        if !seen[v] {
                            seen[v] = true;
                            pred[v] = aid as u32;
                            if v == t {
                                break 'bfs;
                            }
                            queue.push_back(v);
                        }
                    }
                }
            }
            if !seen[t] {
                break;
            }
            let mut nodes = vec![t];
            let mut v = t;
            while v != s {
                let aid = pred[v] as usize;
                self.cap[aid] += 1; // consume one unit of flow
                v = self.to[aid ^ 1] as usize;
                nodes.push(v);
            }
            nodes.reverse();
            out.push(nodes);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_disjoint_paths_in_a_square() {
        // 0 -> 1 -> 3, 0 -> 2 -> 3
        let mut net = FlowNet::new(4);
        net.add_arc(0, 1, 1);
        net.add_arc(1, 3, 1);
        net.add_arc(0, 2, 1);
        net.add_arc(2, 3, 1);
        assert_eq!(net.max_flow(0, 3, 10), 2);
        let paths = net.decompose_paths(0, 3);
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0], vec![0, 1, 3]);
        assert_eq!(paths[1], vec![0, 2, 3]);
    }

    #[test]
    fn bottleneck_cut_is_found() {
        let mut net = FlowNet::new(4);
        net.add_arc(0, 1, 1);
        net.add_arc(1, 2, 1);
        net.add_arc(1, 3, 1);
        net.add_arc(2, 3, 1);
        assert_eq!(net.max_flow(0, 3, 10), 1);
        let side = net.residual_reachable(0);
        assert!(side[0] && !side[3]);
    }

    #[test]
    fn undirected_edges_route_both_ways() {
        let mut net = FlowNet::new(3);
        net.add_undirected_unit(0, 1);
        net.add_undirected_unit(1, 2);
        assert_eq!(net.max_flow(0, 2, 10), 1);
    }
}
