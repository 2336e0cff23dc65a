//! Graph surgeries: splitting-off, degree-2 suppression, fake-edge
//! augmentation, loop-for-edge bookkeeping and the edge-union merge.

use serde::{Deserialize, Serialize};

use crate::connectivity::FlowOracle;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeKind, EdgeSet, MultiGraph, VertexId, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub center: VertexId,
    pub removed: (EdgeId, EdgeId),
    pub added: EdgeId,
    pub endpoints: (VertexId, VertexId),
}

/// Local edge-connectivity for every pair of `vs` (pairs in index order).
pub fn all_pairs_connectivity(g: &MultiGraph, vs: &[VertexId]) -> Result<Vec<u64>> {
    let mut oracle = FlowOracle::new(g);
    let mut out = Vec::with_capacity(vs.len() * vs.len().saturating_sub(1) / 2);
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            out.push(oracle.flow_value(a, b, u64::MAX)?);
        }
    }
    Ok(out)
}

/// Splits off a pair of edges `xy`, `xz` (y != z) at `x` so that the local
/// edge-connectivity between every two vertices other than `x` is preserved.
///
/// Neighbour pairs are tried in lexicographic order and each candidate is
/// checked with all-pairs flows, so this is meant for small graphs.
///
/// # Panics
///
/// If no admissible pair exists although the preconditions hold. That would
/// contradict the splitting-off lemma and points at a bug.
pub fn mader_split(g: &MultiGraph, x: VertexId) -> Result<(MultiGraph, SplitRecord)> {
    g.check_vertex(x)?;
    if g.has_loops() {
        return Err(Error::Precondition("graph has self-loops".into()));
    }
    if g.degree(x)? < 4 {
        return Err(Error::Precondition(format!("vertex {x} has degree below 4")));
    }
    let nbrs: Vec<VertexId> = g.neighbors(x)?.into_iter().collect();
    if nbrs.len() < 2 {
        return Err(Error::Precondition(format!("vertex {x} has fewer than 2 neighbours")));
    }
    if g.is_cut_vertex(x)? {
        return Err(Error::Precondition(format!("vertex {x} is a cut vertex")));
    }

    let others: Vec<VertexId> = g.vertices().filter(|&v| v != x).collect();
    let before = all_pairs_connectivity(g, &others)?;
    let first_edge = |w: VertexId| -> EdgeId {
        g.incident(x)
            .unwrap()
            .iter()
            .copied()
            .find(|&e| g.edge(e).unwrap().other(x) == w)
            .unwrap()
    };

    for (i, &y) in nbrs.iter().enumerate() {
        for &z in &nbrs[i + 1..] {
            let (xy, xz) = (first_edge(y), first_edge(z));
            let mut h = g.clone();
            h.remove_edge(xy)?;
            h.remove_edge(xz)?;
            let added = h.add_edge(y, z)?;
            if preserves(&h, &others, &before)? {
                let rec = SplitRecord { center: x, removed: (xy, xz), added, endpoints: (y, z) };
                return Ok((h, rec));
            }
        }
    }
    panic!("no connectivity-preserving splitting pair at vertex {x}; splitting lemma violated");
}

fn preserves(h: &MultiGraph, vs: &[VertexId], before: &[u64]) -> Result<bool> {
    let mut oracle = FlowOracle::new(h);
    let mut k = 0;
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            if oracle.flow_value(a, b, before[k])? < before[k] {
                return Ok(false);
            }
            k += 1;
        }
    }
    Ok(true)
}

/// Bookkeeping for a suppressed degree-2 vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suppression {
    pub vertex: VertexId,
    pub replaced: (EdgeId, EdgeId),
    pub new_edge: EdgeId,
    pub ends: (VertexId, VertexId),
}

impl Suppression {
    /// Rewrites an edge set that uses the shortcut edge to use the two
    /// original edges instead.
    pub fn expand(&self, class: &EdgeSet) -> EdgeSet {
        let mut out = class.clone();
        if out.remove(&self.new_edge) {
            out.insert(self.replaced.0);
            out.insert(self.replaced.1);
        }
        out
    }
}

/// Replaces the path `x1 - u - x2` by a single edge `x1 - x2` and removes `u`.
pub fn suppress_degree2(g: &MultiGraph, u: VertexId) -> Result<(MultiGraph, Suppression)> {
    let inc: Vec<EdgeId> = g.incident(u)?.iter().copied().collect();
    if g.degree(u)? != 2 || inc.len() != 2 {
        return Err(Error::Precondition(format!("vertex {u} does not have degree 2")));
    }
    let (e1, e2) = (inc[0], inc[1]);
    let (x1, x2) = (g.edge(e1)?.other(u), g.edge(e2)?.other(u));
    if x1 == u || x2 == u {
        return Err(Error::Precondition(format!("vertex {u} carries a loop")));
    }
    if x1 == x2 {
        return Err(Error::Precondition(format!("vertex {u} has a single neighbour")));
    }
    let mut h = g.clone();
    h.remove_vertex(u)?;
    let new_edge = h.add_edge(x1, x2)?;
    Ok((h, Suppression { vertex: u, replaced: (e1, e2), new_edge, ends: (x1, x2) }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FakeEdgeRecord {
    pub at: VertexId,
    pub anchor: VertexId,
    pub edge_ids: EdgeSet,
}

/// Adds flagged parallel edges `v - anchor` until `v` touches `target` edges.
pub fn add_fake_edges(
    g: &MultiGraph,
    v: VertexId,
    target: usize,
    anchor: VertexId,
) -> Result<(MultiGraph, FakeEdgeRecord)> {
    g.check_vertex(anchor)?;
    let have = g.incident_edge_count(v)?;
    if have > target {
        return Err(Error::Precondition(format!(
            "vertex {v} already touches {have} edges, above target {target}"
        )));
    }
    if anchor == v {
        return Err(Error::Precondition("anchor must differ from the augmented vertex".into()));
    }
    let mut h = g.clone();
    let mut edge_ids = EdgeSet::new();
    for _ in have..target {
        edge_ids.insert(h.add_edge_with_kind(v, anchor, EdgeKind::Fake)?);
    }
    Ok((h, FakeEdgeRecord { at: v, anchor, edge_ids }))
}

/// Drops the edges of `class` that `g` flags as fake.
pub fn strip_fake(class: &EdgeSet, g: &MultiGraph) -> EdgeSet {
    class
        .iter()
        .copied()
        .filter(|&e| g.edge(e).map(|x| x.kind != EdgeKind::Fake).unwrap_or(true))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopMapping {
    pub original: EdgeId,
    pub endpoints: (VertexId, VertexId),
    pub kind: EdgeKind,
    pub loops: Vec<(VertexId, EdgeId)>,
}

/// Deletes `e` and puts a flagged loop on each of its endpoints that lies in
/// `reserve`, so reserve vertices keep their incident-edge count.
pub fn loop_for_edge(g: &MultiGraph, e: EdgeId, reserve: &VertexSet) -> Result<(MultiGraph, LoopMapping)> {
    let edge = *g.edge(e)?;
    let mut h = g.clone();
    h.remove_edge(e)?;
    let mut ends: Vec<VertexId> = vec![edge.u, edge.v];
    ends.dedup();
    let mut loops = Vec::new();
    for w in ends {
        if reserve.contains(&w) {
            loops.push((w, h.add_edge_with_kind(w, w, EdgeKind::BookkeepingLoop)?));
        }
    }
    Ok((h, LoopMapping { original: e, endpoints: (edge.u, edge.v), kind: edge.kind, loops }))
}

/// Undoes [`loop_for_edge`]: drops the bookkeeping loops and reinstates the
/// original edge under its old id.
pub fn restore_loops(g: &MultiGraph, map: &LoopMapping) -> Result<MultiGraph> {
    let mut h = g.clone();
    for &(_, l) in &map.loops {
        h.remove_edge(l)?;
    }
    h.insert_edge(map.original, map.endpoints.0, map.endpoints.1, map.kind)?;
    Ok(h)
}

/// Subgraph of `base` induced by the union of two edge sets taken from graphs
/// derived from `base` by contraction.
pub fn edge_union(base: &MultiGraph, es1: &EdgeSet, es2: &EdgeSet) -> Result<MultiGraph> {
    let all: EdgeSet = es1.union(es2).copied().collect();
    base.edge_induced_subgraph(&all)
}
