//! Dense Dinic kernel on undirected arcs.
//!
//! Each undirected edge becomes a pair of arcs `a`, `a ^ 1` that are each
//! other's reverse and both start with the edge capacity, so pushing along
//! one direction frees capacity on the other. Sources and sinks are given as
//! sets, which is how constrained cuts contract their seed sets without
//! adding super-vertices.

use std::collections::VecDeque;

pub(crate) const INF_CAP: u32 = u32::MAX / 4;
const UNSEEN: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub(crate) struct FlowNet {
    adj: Vec<Vec<u32>>,
    to: Vec<u32>,
    cap: Vec<u32>,
    init: Vec<u32>,
    level: Vec<u32>,
    it: Vec<usize>,
}

impl FlowNet {
    pub(crate) fn new(n: usize) -> Self {
        FlowNet {
            adj: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
            init: Vec::new(),
            level: vec![UNSEEN; n],
            it: vec![0; n],
        }
    }

    pub(crate) fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Adds an undirected edge and returns the index of its forward arc.
    pub(crate) fn add_undirected(&mut self, u: usize, v: usize, cap: u32) -> usize {
        let a = self.to.len();
        self.to.push(v as u32);
        self.cap.push(cap);
        self.init.push(cap);
        self.to.push(u as u32);
        self.cap.push(cap);
        self.init.push(cap);
        self.adj[u].push(a as u32);
        self.adj[v].push(a as u32 + 1);
        a
    }

    pub(crate) fn reset(&mut self) {
        self.cap.copy_from_slice(&self.init);
    }

    fn bfs(&mut self, sources: &[usize], is_sink: &[bool]) -> bool {
        self.level.fill(UNSEEN);
        let mut q = VecDeque::new();
        for &s in sources {
            self.level[s] = 0;
            q.push_back(s);
        }
        let mut hit = false;
        while let Some(u) = q.pop_front() {
            if is_sink[u] {
                hit = true;
                continue;
            }
            for &a in &self.adj[u] {
                let a = a as usize;
                let w = self.to[a] as usize;
                if self.cap[a] > 0 && self.level[w] == UNSEEN {
                    self.level[w] = self.level[u] + 1;
                    q.push_back(w);
                }
            }
        }
        hit
    }

    // Finds one augmenting path in the level graph from `s` and pushes one unit.
    fn augment_from(&mut self, s: usize, is_sink: &[bool], path: &mut Vec<usize>) -> bool {
        path.clear();
        let mut u = s;
        loop {
            if is_sink[u] {
                for &a in path.iter() {
                    self.cap[a] -= 1;
                    self.cap[a ^ 1] += 1;
                }
                return true;
            }
            let mut advanced = false;
            while self.it[u] < self.adj[u].len() {
                let a = self.adj[u][self.it[u]] as usize;
                let w = self.to[a] as usize;
                if self.cap[a] > 0 && self.level[w] == self.level[u] + 1 {
                    path.push(a);
                    u = w;
                    advanced = true;
                    break;
                }
                self.it[u] += 1;
            }
            if !advanced {
                // dead end: retire the vertex and back up one arc
                self.level[u] = UNSEEN;
                match path.pop() {
                    None => return false,
                    Some(a) => {
                        u = self.to[a ^ 1] as usize;
                        self.it[u] += 1;
                    }
                }
            }
        }
    }

    /// Maximum flow from the source set to the sink set, stopping early once
    /// `limit` units have been pushed. The sets must be disjoint.
    pub(crate) fn max_flow(&mut self, sources: &[usize], is_sink: &[bool], limit: u64) -> u64 {
        let mut total = 0u64;
        let mut path = Vec::new();
        while total < limit && self.bfs(sources, is_sink) {
            self.it.fill(0);
            for &s in sources {
                while total < limit && self.augment_from(s, is_sink, &mut path) {
                    total += 1;
                }
            }
        }
        total
    }

    /// Nodes reachable from the sources in the residual network.
    pub(crate) fn source_side(&self, sources: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        let mut stack = Vec::new();
        for &s in sources {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(u) = stack.pop() {
            for &a in &self.adj[u] {
                let a = a as usize;
                let w = self.to[a] as usize;
                if self.cap[a] > 0 && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}
