//! Flow-based connectivity oracles.
//!
//! All cuts are returned in canonical source-minimal form: `side_a` is the set
//! of vertices reachable from the source side in the final residual network.
//! Ties between equally small cuts are broken by the sorted `side_a` list.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::FlowNet;
use crate::graph::{EdgeId, EdgeSet, MultiGraph, TerminalSystem, VertexId, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutCertificate {
    pub side_a: VertexSet,
    pub side_b: VertexSet,
    pub crossing: EdgeSet,
    pub size: u64,
}

impl CutCertificate {
    /// Builds the certificate for `side_a` in `g`, recomputing the crossing set.
    pub fn from_side(g: &MultiGraph, side_a: VertexSet) -> Self {
        let side_b: VertexSet = g.vertices().filter(|v| !side_a.contains(v)).collect();
        let crossing = g.boundary(&side_a);
        let size = crossing.len() as u64;
        CutCertificate { side_a, side_b, crossing, size }
    }

    fn key(&self) -> (u64, Vec<VertexId>) {
        (self.size, self.side_a.iter().copied().collect())
    }
}

fn better(a: &CutCertificate, b: &CutCertificate) -> bool {
    a.key().cmp(&b.key()) == Ordering::Less
}

/// Reusable flow network over the loop-free edges of a graph.
pub struct FlowOracle<'g> {
    g: &'g MultiGraph,
    index: BTreeMap<VertexId, usize>,
    verts: Vec<VertexId>,
    net: FlowNet,
}

impl<'g> FlowOracle<'g> {
    pub fn new(g: &'g MultiGraph) -> Self {
        let verts: Vec<VertexId> = g.vertices().collect();
        let index: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut net = FlowNet::new(verts.len());
        for (_, e) in g.edges() {
            if !e.is_loop() {
                net.add_undirected(index[&e.u], index[&e.v], 1);
            }
        }
        FlowOracle { g, index, verts, net }
    }

    fn indices(&self, set: &VertexSet) -> Result<Vec<usize>> {
        set.iter()
            .map(|v| self.index.get(v).copied().ok_or(Error::UnknownVertex(*v)))
            .collect()
    }

    /// Minimum cut with `sources` on side A and `sinks` on side B.
    pub fn min_cut(&mut self, sources: &VertexSet, sinks: &VertexSet) -> Result<(u64, CutCertificate)> {
        if sources.is_empty() || sinks.is_empty() || !sources.is_disjoint(sinks) {
            return Err(Error::BadSeeds);
        }
        let src = self.indices(sources)?;
        let snk = self.indices(sinks)?;
        let mut is_sink = vec![false; self.net.node_count()];
        for &t in &snk {
            is_sink[t] = true;
        }
        self.net.reset();
        let value = self.net.max_flow(&src, &is_sink, u64::MAX);
        let reach = self.net.source_side(&src);
        let side_a: VertexSet = reach
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(|(i, _)| self.verts[i])
            .collect();
        let cut = CutCertificate::from_side(self.g, side_a);
        assert_eq!(cut.size, value, "max-flow value differs from min-cut size");
        Ok((value, cut))
    }

    /// Flow value only, stopping once `limit` is reached.
    pub fn flow_value(&mut self, s: VertexId, t: VertexId, limit: u64) -> Result<u64> {
        if s == t {
            return Err(Error::SameEndpoints(s));
        }
        let si = *self.index.get(&s).ok_or(Error::UnknownVertex(s))?;
        let ti = *self.index.get(&t).ok_or(Error::UnknownVertex(t))?;
        let mut is_sink = vec![false; self.net.node_count()];
        is_sink[ti] = true;
        self.net.reset();
        Ok(self.net.max_flow(&[si], &is_sink, limit))
    }
}

/// Maximum number of edge-disjoint `s`-`t` paths with a minimum cut.
pub fn max_flow_unit(g: &MultiGraph, s: VertexId, t: VertexId) -> Result<(u64, CutCertificate)> {
    if s == t {
        return Err(Error::SameEndpoints(s));
    }
    FlowOracle::new(g).min_cut(&[s].into(), &[t].into())
}

/// Steiner edge-connectivity of `terminals`: the minimum pairwise flow,
/// computed with |S|-1 flows from the smallest terminal.
pub fn steiner_connectivity(g: &MultiGraph, terminals: &VertexSet) -> Result<(u64, CutCertificate)> {
    if terminals.len() < 2 {
        return Err(Error::TooFewTerminals { needed: 2, got: terminals.len() });
    }
    let mut oracle = FlowOracle::new(g);
    let mut it = terminals.iter();
    let s0 = *it.next().unwrap();
    let mut best: Option<CutCertificate> = None;
    for &v in it {
        let (_, cut) = oracle.min_cut(&[s0].into(), &[v].into())?;
        if best.as_ref().is_none_or(|b| better(&cut, b)) {
            best = Some(cut);
        }
    }
    let best = best.unwrap();
    Ok((best.size, best))
}

/// Minimum cut keeping `side_a_seed` on side A and `side_b_seed` on side B.
pub fn constrained_min_cut(
    g: &MultiGraph,
    side_a_seed: &VertexSet,
    side_b_seed: &VertexSet,
) -> Result<(u64, CutCertificate)> {
    FlowOracle::new(g).min_cut(side_a_seed, side_b_seed)
}

/// Which groups ended up on each side of a terminal-separating cut.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSplit {
    pub side_a: Vec<usize>,
    pub side_b: Vec<usize>,
}

/// Minimum cut that keeps every group whole and separates at least two of them.
///
/// Group 0 is pinned to side A; all `2^(t-1) - 1` splits are tried.
pub fn min_terminal_separating_cut(
    g: &MultiGraph,
    ts: &TerminalSystem,
) -> Result<(u64, CutCertificate, GroupSplit)> {
    let t = ts.groups.len();
    if t < 2 {
        return Err(Error::TooFewTerminals { needed: 2, got: t });
    }
    if t > 20 {
        return Err(Error::TooLarge { size: t, bound: 20 });
    }
    let mut oracle = FlowOracle::new(g);
    let mut best: Option<(CutCertificate, GroupSplit)> = None;
    for mask in 1u32..(1u32 << (t - 1)) {
        let mut split = GroupSplit { side_a: vec![0], side_b: Vec::new() };
        for j in 1..t {
            if mask & (1 << (j - 1)) != 0 {
                split.side_b.push(j);
            } else {
                split.side_a.push(j);
            }
        }
        let a: VertexSet = split.side_a.iter().flat_map(|&j| ts.groups[j].iter().copied()).collect();
        let b: VertexSet = split.side_b.iter().flat_map(|&j| ts.groups[j].iter().copied()).collect();
        let (_, cut) = oracle.min_cut(&a, &b)?;
        let replace = match &best {
            None => true,
            Some((bc, bs)) => (cut.size, &split.side_a) < (bc.size, &bs.side_a),
        };
        if replace {
            best = Some((cut, split));
        }
    }
    let (cut, split) = best.unwrap();
    Ok((cut.size, cut, split))
}

/// Edge-disjoint paths out of one source.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSystem {
    pub source: VertexId,
    pub sink: Option<VertexId>,
    pub paths: Vec<Vec<EdgeId>>,
    pub total_length: usize,
}

impl PathSystem {
    pub fn new(source: VertexId, sink: Option<VertexId>, paths: Vec<Vec<EdgeId>>) -> Self {
        let total_length = paths.iter().map(Vec::len).sum();
        PathSystem { source, sink, paths, total_length }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Vertices visited by each path, or `None` if some path is not a walk from
    /// the source.
    pub fn walks(&self, g: &MultiGraph) -> Option<Vec<Vec<VertexId>>> {
        self.paths.iter().map(|p| walk(g, self.source, p)).collect()
    }

    /// Whether no edge is used twice across the whole system.
    pub fn is_edge_disjoint(&self) -> bool {
        let mut seen = EdgeSet::new();
        self.paths.iter().flatten().all(|e| seen.insert(*e))
    }
}

/// Follows `edges` from `start`; `None` if some edge does not continue the walk.
pub fn walk(g: &MultiGraph, start: VertexId, edges: &[EdgeId]) -> Option<Vec<VertexId>> {
    let mut at = start;
    let mut seq = vec![start];
    for &id in edges {
        let e = g.edge(id).ok()?;
        if !e.touches(at) {
            return None;
        }
        at = e.other(at);
        seq.push(at);
    }
    Some(seq)
}

/// `f` edge-disjoint `s`-`t` paths of minimum total length (successive
/// shortest augmenting paths with unit costs).
pub fn min_cost_disjoint_paths(g: &MultiGraph, s: VertexId, t: VertexId, f: usize) -> Result<PathSystem> {
    if s == t {
        return Err(Error::SameEndpoints(s));
    }
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    let verts: Vec<VertexId> = g.vertices().collect();
    let index: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = verts.len();

    // residual arcs: 4 per edge (two directions, each with its reverse)
    struct Arc {
        to: usize,
        cap: i32,
        cost: i64,
        edge: EdgeId,
    }
    let mut arcs: Vec<Arc> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let push_pair = |arcs: &mut Vec<Arc>, adj: &mut Vec<Vec<usize>>, u: usize, v: usize, e: EdgeId| {
        let a = arcs.len();
        arcs.push(Arc { to: v, cap: 1, cost: 1, edge: e });
        arcs.push(Arc { to: u, cap: 0, cost: -1, edge: e });
        adj[u].push(a);
        adj[v].push(a + 1);
    };
    for (id, e) in g.edges() {
        if e.is_loop() {
            continue;
        }
        let (u, v) = (index[&e.u], index[&e.v]);
        push_pair(&mut arcs, &mut adj, u, v, id);
        push_pair(&mut arcs, &mut adj, v, u, id);
    }

    let (si, ti) = (index[&s], index[&t]);
    let mut potential = vec![0i64; n];
    let mut pushed = 0usize;
    while pushed < f {
        // Dijkstra on reduced costs
        let mut dist = vec![i64::MAX; n];
        let mut prev: Vec<Option<usize>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        dist[si] = 0;
        heap.push(Reverse((0i64, si)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &a in &adj[u] {
                let arc = &arcs[a];
                if arc.cap <= 0 {
                    continue;
                }
                let nd = d + arc.cost + potential[u] - potential[arc.to];
                if nd < dist[arc.to] {
                    dist[arc.to] = nd;
                    prev[arc.to] = Some(a);
                    heap.push(Reverse((nd, arc.to)));
                }
            }
        }
        if dist[ti] == i64::MAX {
            return Err(Error::InsufficientConnectivity { requested: f, available: pushed as u64 });
        }
        for v in 0..n {
            if dist[v] != i64::MAX {
                potential[v] += dist[v];
            }
        }
        let mut x = ti;
        while let Some(a) = prev[x] {
            arcs[a].cap -= 1;
            arcs[a ^ 1].cap += 1;
            x = arcs[a ^ 1].to;
        }
        pushed += 1;
    }

    // Net flow per edge direction. Arc a carries flow iff its cap dropped to 0
    // (forward arcs are the even indices).
    let mut out: Vec<Vec<(usize, EdgeId)>> = vec![Vec::new(); n];
    let mut a = 0;
    while a < arcs.len() {
        // arcs a, a+1: u->v; arcs a+2, a+3: v->u
        let fwd = arcs[a].cap == 0;
        let bwd = arcs[a + 2].cap == 0;
        let (u, v) = (arcs[a + 1].to, arcs[a].to);
        match (fwd, bwd) {
            (true, false) => out[u].push((v, arcs[a].edge)),
            (false, true) => out[v].push((u, arcs[a].edge)),
            _ => {}
        }
        a += 4;
    }
    for list in &mut out {
        list.sort_by_key(|&(_, e)| Reverse(e));
    }

    let mut paths = Vec::with_capacity(f);
    for _ in 0..f {
        let mut visited = vec![si];
        let mut edges: Vec<EdgeId> = Vec::new();
        let mut x = si;
        while x != ti {
            let (y, e) = out[x].pop().expect("flow conservation");
            // splice out any cycle so every path stays simple
            if let Some(pos) = visited.iter().position(|&w| w == y) {
                visited.truncate(pos + 1);
                edges.truncate(pos);
            } else {
                visited.push(y);
                edges.push(e);
            }
            x = y;
        }
        paths.push(edges);
    }
    let sys = PathSystem::new(s, Some(t), paths);
    Ok(sys)
}

/// Checks that `sys1` (from `v1`) and `sys2` (from `v2`) are common paths
/// under `pairing`: both systems internally edge-disjoint, and path `i` of
/// `sys1` ends where path `pairing[i]` of `sys2` ends.
pub fn verify_common_paths(
    g: &MultiGraph,
    v1: VertexId,
    v2: VertexId,
    sys1: &PathSystem,
    sys2: &PathSystem,
    pairing: &[usize],
) -> Result<bool> {
    if sys1.len() != sys2.len() || pairing.len() != sys1.len() {
        return Err(Error::SizeMismatch(format!(
            "systems of size {} and {} with a pairing of size {}",
            sys1.len(),
            sys2.len(),
            pairing.len()
        )));
    }
    let mut used = vec![false; pairing.len()];
    for &j in pairing {
        if j >= used.len() || std::mem::replace(&mut used[j], true) {
            return Err(Error::Invalid("pairing is not a bijection".into()));
        }
    }
    if sys1.source != v1 || sys2.source != v2 {
        return Ok(false);
    }
    if !sys1.is_edge_disjoint() || !sys2.is_edge_disjoint() {
        return Ok(false);
    }
    let (Some(w1), Some(w2)) = (sys1.walks(g), sys2.walks(g)) else {
        return Ok(false);
    };
    Ok(pairing
        .iter()
        .enumerate()
        .all(|(i, &j)| w1[i].last() == w2[j].last()))
}
