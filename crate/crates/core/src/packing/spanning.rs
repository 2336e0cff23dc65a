//! Edge-disjoint spanning trees by matroid partition.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::Packing;
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, MultiGraph, VertexId, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpanningOutcome {
    Trees(Packing),
    /// A vertex partition with fewer than `k (parts - 1)` crossing edges.
    Infeasible { partition: Vec<VertexSet>, crossing: usize },
}

impl SpanningOutcome {
    pub fn packing(&self) -> Option<&Packing> {
        match self {
            SpanningOutcome::Trees(p) => Some(p),
            SpanningOutcome::Infeasible { .. } => None,
        }
    }
}

const NONE: usize = usize::MAX;

struct Forests {
    n: usize,
    ends: Vec<(usize, usize)>,
    owner: Vec<usize>,
    adj: Vec<Vec<Vec<usize>>>,
}

impl Forests {
    // Edges of forest `f` on the path between `a` and `b`, or None if they
    // are in different trees.
    fn path(&self, f: usize, a: usize, b: usize) -> Option<Vec<usize>> {
        let mut via = vec![NONE; self.n];
        let mut seen = vec![false; self.n];
        seen[a] = true;
        let mut q = VecDeque::from([a]);
        while let Some(x) = q.pop_front() {
            if x == b {
                break;
            }
            for &e in &self.adj[f][x] {
                let (u, v) = self.ends[e];
                let y = if u == x { v } else { u };
                if !seen[y] {
                    seen[y] = true;
                    via[y] = e;
                    q.push_back(y);
                }
            }
        }
        if !seen[b] {
            return None;
        }
        let mut out = Vec::new();
        let mut x = b;
        while x != a {
            let e = via[x];
            out.push(e);
            let (u, v) = self.ends[e];
            x = if u == x { v } else { u };
        }
        Some(out)
    }

    fn insert(&mut self, f: usize, e: usize) {
        let (u, v) = self.ends[e];
        self.adj[f][u].push(e);
        self.adj[f][v].push(e);
        self.owner[e] = f;
    }

    fn remove(&mut self, f: usize, e: usize) {
        let (u, v) = self.ends[e];
        self.adj[f][u].retain(|&x| x != e);
        self.adj[f][v].retain(|&x| x != e);
        self.owner[e] = NONE;
    }

    // Breadth-first search of the exchange graph from `starts`. Applies the
    // first augmenting path found and returns true, or returns false and
    // leaves the set of reached edges in `reached`.
    fn augment(&mut self, k: usize, starts: &[usize], reached: &mut Vec<bool>) -> bool {
        let m = self.ends.len();
        let mut label: Vec<(usize, usize)> = vec![(NONE, NONE); m];
        reached.clear();
        reached.resize(m, false);
        let mut q = VecDeque::new();
        for &s in starts {
            reached[s] = true;
            q.push_back(s);
        }
        while let Some(x) = q.pop_front() {
            let (u, v) = self.ends[x];
            for f in 0..k {
                if f == self.owner[x] {
                    continue;
                }
                match self.path(f, u, v) {
                    None => {
                        // x fits into f: walk the labels back
                        let mut cur = x;
                        let mut into = f;
                        loop {
                            let from = self.owner[cur];
                            if from != NONE {
                                self.remove(from, cur);
                            }
                            self.insert(into, cur);
                            let (prev, pf) = label[cur];
                            if prev == NONE {
                                return true;
                            }
                            debug_assert_eq!(pf, from);
                            cur = prev;
                            into = pf;
                        }
                    }
                    Some(cycle) => {
                        for y in cycle {
                            if !reached[y] {
                                reached[y] = true;
                                label[y] = (x, f);
                                q.push_back(y);
                            }
                        }
                    }
                }
            }
        }
        false
    }
}

/// the partition condition (fewer than k(p-1) crossing edges).
/// the Tutte and Nash-Williams condition.
pub fn pack_spanning_trees(g: &MultiGraph, k: usize) -> Result<SpanningOutcome> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let verts: Vec<VertexId> = g.vertices().collect();
    let index: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = verts.len();
    let mut ids = Vec::new();
    let mut ends = Vec::new();
    for (id, e) in g.edges() {
        if !e.is_loop() {
            ids.push(id);
            ends.push((index[&e.u], index[&e.v]));
        }
    }
    let m = ids.len();
    let mut fs = Forests { n, ends, owner: vec![NONE; m], adj: vec![vec![Vec::new(); n]; k] };
    let target = k * n.saturating_sub(1);
    let mut placed = 0usize;
    let mut reached = Vec::new();
    for e in 0..m {
        if placed == target {
            break;
        }
        if fs.augment(k, &[e], &mut reached) {
            placed += 1;
        }
    }
    if placed == target {
        let mut classes = vec![EdgeSet::new(); k];
        for e in 0..m {
            if fs.owner[e] != NONE {
                classes[fs.owner[e]].insert(ids[e]);
            }
        }
        return Ok(SpanningOutcome::Trees(Packing::new(classes)));
    }

    // closure of the unplaced edges in the exchange graph
    let unplaced: Vec<usize> = (0..m).filter(|&e| fs.owner[e] == NONE).collect();
    if unplaced.is_empty() {
        reached = vec![false; m];
    } else {
        let grew = fs.augment(k, &unplaced, &mut reached);
        assert!(!grew, "greedy matroid partition left an augmentable edge");
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for e in (0..m).filter(|&e| reached[e]) {
        let (u, v) = fs.ends[e];
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        parent[a] = b;
    }
    let mut blocks: BTreeMap<usize, VertexSet> = BTreeMap::new();
    for (i, &v) in verts.iter().enumerate().take(n) {
        let r = find(&mut parent, i);
        blocks.entry(r).or_default().insert(v);
    }
    let mut partition: Vec<VertexSet> = blocks.into_values().collect();
    partition.sort();
    let block_of: BTreeMap<VertexId, usize> =
        partition.iter().enumerate().flat_map(|(i, b)| b.iter().map(move |&v| (v, i))).collect();
    let crossing = fs.ends.iter().filter(|&&(u, v)| block_of[&verts[u]] != block_of[&verts[v]]).count();
    assert!(crossing < k * (partition.len() - 1), "witness partition does not violate the condition");
    Ok(SpanningOutcome::Infeasible { partition, crossing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TerminalSystem;
    use crate::packing::{verify_packing, PackOptions};

    fn graph(n: usize, edges: &[(usize, usize)]) -> (MultiGraph, Vec<VertexId>) {
        let mut g = MultiGraph::new();
        let vs: Vec<_> = (0..n).map(|_| g.add_vertex()).collect();
        for &(a, b) in edges {
            g.add_edge(vs[a], vs[b]).unwrap();
        }
        (g, vs)
    }

    fn assert_trees(g: &MultiGraph, p: &Packing) {
        let ts = TerminalSystem::single(g.vertex_set());
        assert!(verify_packing(g, &ts, p, &PackOptions::default()).passed());
        for c in &p.classes {
            assert_eq!(c.len(), g.vertex_count() - 1);
        }
    }

    #[test]
    fn k4_holds_two_trees() {
        let (g, _) = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let out = pack_spanning_trees(&g, 2).unwrap();
        assert_trees(&g, out.packing().expect("feasible"));
    }

    #[test]
    fn tree_with_two_classes_is_infeasible() {
        let (g, vs) = graph(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]);
        match pack_spanning_trees(&g, 2).unwrap() {
            SpanningOutcome::Infeasible { partition, crossing } => {
                assert_eq!(partition.len(), 5);
                assert_eq!(partition[0], [vs[0]].into());
                assert_eq!(crossing, 4);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn exchange_needed() {
        // greedy insertion fills the first forest with a bad choice on a
        // doubled cycle; two Hamiltonian paths still exist
        let (g, _) = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 1), (1, 2), (2, 3), (3, 0)]);
        let out = pack_spanning_trees(&g, 2).unwrap();
        assert_trees(&g, out.packing().expect("feasible"));
        let out = pack_spanning_trees(&g, 3).unwrap();
        assert!(out.packing().is_none());
    }

    #[test]
    fn disconnected_rejected() {
        let (g, _) = graph(3, &[(0, 1)]);
        assert!(matches!(pack_spanning_trees(&g, 1), Err(Error::Disconnected)));
    }
}
