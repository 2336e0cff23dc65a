//! Multigraph with stable edge identities.
//!
//! Every graph belongs to a *family*: the graph it was created as plus every
//! graph derived from it by contraction, deletion or subdivision. Vertex and
//! edge handles are drawn from counters shared by the whole family, so edge
//! sets taken from two derived graphs can be merged back into the base graph
//! by id without collisions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type VertexSet = BTreeSet<VertexId>;
pub type EdgeSet = BTreeSet<EdgeId>;

/// Provenance of an edge. Surgeries that add temporary edges flag them so
/// verifiers can refuse packings that still use them after restoration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EdgeKind {
    #[default]
    Original,
    Fake,
    BookkeepingLoop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub kind: EdgeKind,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// The endpoint opposite `x`. For a loop this is `x` itself.
    pub fn other(&self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }
}

#[derive(Debug)]
struct IdSpace {
    next_vertex: AtomicU64,
    next_edge: AtomicU64,
}

impl IdSpace {
    fn new(next_vertex: u64, next_edge: u64) -> Arc<Self> {
        Arc::new(IdSpace {
            next_vertex: AtomicU64::new(next_vertex),
            next_edge: AtomicU64::new(next_edge),
        })
    }

    fn reserve_vertex(&self, at_least: u64) {
        self.next_vertex.fetch_max(at_least, Ordering::Relaxed);
    }

    fn reserve_edge(&self, at_least: u64) {
        self.next_edge.fetch_max(at_least, Ordering::Relaxed);
    }
}

/// An undirected multigraph. Parallel edges and self-loops are allowed.
///
/// Cloning a graph keeps it in the same family (ids stay globally fresh
/// across the clone and the original).
#[derive(Clone, Debug)]
pub struct MultiGraph {
    // incidence lists; a loop appears once in its vertex's list
    adj: BTreeMap<VertexId, EdgeSet>,
    edges: BTreeMap<EdgeId, Edge>,
    ids: Arc<IdSpace>,
}

impl Default for MultiGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl PartialEq for MultiGraph {
    fn eq(&self, other: &Self) -> bool {
        self.adj == other.adj && self.edges == other.edges
    }
}

impl MultiGraph {
    /// Creates an empty graph starting a new id family.
    pub fn new() -> Self {
        MultiGraph {
            adj: BTreeMap::new(),
            edges: BTreeMap::new(),
            ids: IdSpace::new(0, 0),
        }
    }

    /// An empty graph in the same id family as `self`.
    pub fn empty_like(&self) -> Self {
        MultiGraph {
            adj: BTreeMap::new(),
            edges: BTreeMap::new(),
            ids: Arc::clone(&self.ids),
        }
    }

    pub fn same_family(&self, other: &MultiGraph) -> bool {
        Arc::ptr_eq(&self.ids, &other.ids)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        let id = VertexId(self.ids.next_vertex.fetch_add(1, Ordering::Relaxed));
        self.adj.insert(id, EdgeSet::new());
        id
    }

    /// Inserts a vertex with a caller-chosen id (used by the file loader).
    pub fn insert_vertex(&mut self, id: VertexId) -> Result<()> {
        if self.adj.contains_key(&id) {
            return Err(Error::DuplicateVertex(id));
        }
        self.ids.reserve_vertex(id.0 + 1);
        self.adj.insert(id, EdgeSet::new());
        Ok(())
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId> {
        self.add_edge_with_kind(u, v, EdgeKind::Original)
    }

    pub fn add_edge_with_kind(&mut self, u: VertexId, v: VertexId, kind: EdgeKind) -> Result<EdgeId> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let id = EdgeId(self.ids.next_edge.fetch_add(1, Ordering::Relaxed));
        self.link(id, Edge { u, v, kind });
        Ok(id)
    }

    /// Inserts an edge with a caller-chosen id (used by the file loader and
    /// by graphs that copy edges out of a base graph).
    pub fn insert_edge(&mut self, id: EdgeId, u: VertexId, v: VertexId, kind: EdgeKind) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if self.edges.contains_key(&id) {
            return Err(Error::DuplicateEdge(id));
        }
        self.ids.reserve_edge(id.0 + 1);
        self.link(id, Edge { u, v, kind });
        Ok(())
    }

    fn link(&mut self, id: EdgeId, e: Edge) {
        self.adj.get_mut(&e.u).expect("live endpoint").insert(id);
        self.adj.get_mut(&e.v).expect("live endpoint").insert(id);
        self.edges.insert(id, e);
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Result<Edge> {
        let e = self.edges.remove(&id).ok_or(Error::UnknownEdge(id))?;
        self.adj.get_mut(&e.u).expect("live endpoint").remove(&id);
        self.adj.get_mut(&e.v).expect("live endpoint").remove(&id);
        Ok(e)
    }

    /// Removes `v` together with all incident edges.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<Vec<EdgeId>> {
        let inc = self.adj.get(&v).ok_or(Error::UnknownVertex(v))?.clone();
        for &e in &inc {
            self.remove_edge(e)?;
        }
        self.adj.remove(&v);
        Ok(inc.into_iter().collect())
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if self.adj.contains_key(&v) {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    pub fn edge(&self, e: EdgeId) -> Result<&Edge> {
        self.edges.get(&e).ok_or(Error::UnknownEdge(e))
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.adj.keys().copied().collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        self.edges.iter().map(|(&id, e)| (id, e))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    /// Edges touching `v`, each listed once (a loop included).
    pub fn incident(&self, v: VertexId) -> Result<&EdgeSet> {
        self.adj.get(&v).ok_or(Error::UnknownVertex(v))
    }

    /// Classical degree: a loop contributes 2.
    pub fn degree(&self, v: VertexId) -> Result<usize> {
        let inc = self.incident(v)?;
        Ok(inc.iter().map(|e| if self.edges[e].is_loop() { 2 } else { 1 }).sum())
    }

    /// Number of distinct edges touching `v`; a loop counts once.
    pub fn incident_edge_count(&self, v: VertexId) -> Result<usize> {
        Ok(self.incident(v)?.len())
    }

    /// Degree ignoring loops entirely.
    pub fn loopless_degree(&self, v: VertexId) -> Result<usize> {
        let inc = self.incident(v)?;
        Ok(inc.iter().filter(|e| !self.edges[e].is_loop()).count())
    }

    /// Distinct neighbours of `v` other than `v` itself.
    pub fn neighbors(&self, v: VertexId) -> Result<VertexSet> {
        let inc = self.incident(v)?;
        Ok(inc
            .iter()
            .map(|e| self.edges[e].other(v))
            .filter(|&w| w != v)
            .collect())
    }

    pub fn has_loops(&self) -> bool {
        self.edges.values().any(Edge::is_loop)
    }

    pub fn edges_of_kind(&self, kind: EdgeKind) -> EdgeSet {
        self.edges
            .iter()
            .filter(|(_, e)| e.kind == kind)
            .map(|(&id, _)| id)
            .collect()
    }

    /// Contracts `part` into a single fresh vertex.
    ///
    /// Edges inside `part` are dropped (no loops are created). Boundary edges
    /// keep their id with the inner endpoint replaced by the new vertex.
    /// Returns the new graph, the new vertex and the kept boundary edges.
    pub fn contract(&self, part: &VertexSet) -> Result<(MultiGraph, VertexId, EdgeSet)> {
        if part.is_empty() || part.len() >= self.vertex_count() {
            return Err(Error::BadContraction);
        }
        for &v in part {
            self.check_vertex(v)?;
        }
        let mut out = self.empty_like();
        for v in self.vertices().filter(|v| !part.contains(v)) {
            out.adj.insert(v, EdgeSet::new());
        }
        let merged = out.add_vertex();
        let mut kept = EdgeSet::new();
        for (id, e) in self.edges() {
            let (iu, iv) = (part.contains(&e.u), part.contains(&e.v));
            match (iu, iv) {
                (true, true) => {}
                (false, false) => out.link(id, *e),
                (true, false) => {
                    out.link(id, Edge { u: merged, v: e.v, kind: e.kind });
                    kept.insert(id);
                }
                (false, true) => {
                    out.link(id, Edge { u: e.u, v: merged, kind: e.kind });
                    kept.insert(id);
                }
            }
        }
        Ok((out, merged, kept))
    }

    /// Replaces `e` by a path through a new degree-2 vertex.
    pub fn subdivide(&mut self, e: EdgeId) -> Result<(VertexId, EdgeId, EdgeId)> {
        let old = self.remove_edge(e)?;
        let m = self.add_vertex();
        let e1 = self.add_edge_with_kind(old.u, m, old.kind)?;
        let e2 = self.add_edge_with_kind(m, old.v, old.kind)?;
        Ok((m, e1, e2))
    }

    /// Subgraph on exactly the given edges (ids preserved) and their endpoints.
    pub fn edge_induced_subgraph(&self, es: &EdgeSet) -> Result<MultiGraph> {
        let mut out = self.empty_like();
        for &id in es {
            let e = *self.edge(id)?;
            out.adj.entry(e.u).or_default();
            out.adj.entry(e.v).or_default();
            out.link(id, e);
        }
        Ok(out)
    }

    /// Copy of `self` without the listed vertices (and their edges).
    pub fn without_vertices(&self, drop: &VertexSet) -> MultiGraph {
        let mut out = self.empty_like();
        for v in self.vertices().filter(|v| !drop.contains(v)) {
            out.adj.insert(v, EdgeSet::new());
        }
        for (id, e) in self.edges() {
            if !drop.contains(&e.u) && !drop.contains(&e.v) {
                out.link(id, *e);
            }
        }
        out
    }

    /// Connected components, each as a vertex set, ordered by minimum vertex.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut seen = VertexSet::new();
        let mut comps = Vec::new();
        for start in self.vertices() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = VertexSet::new();
            let mut stack = vec![start];
            comp.insert(start);
            while let Some(x) = stack.pop() {
                for e in &self.adj[&x] {
                    let y = self.edges[e].other(x);
                    if seen.insert(y) {
                        comp.insert(y);
                        stack.push(y);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Whether removing `v` increases the number of connected components.
    pub fn is_cut_vertex(&self, v: VertexId) -> Result<bool> {
        self.check_vertex(v)?;
        let before = self.components().len();
        let mut drop = VertexSet::new();
        drop.insert(v);
        let after = self.without_vertices(&drop).components().len();
        Ok(after > before)
    }

    /// Whether all of `set` lies in one connected component.
    pub fn connects(&self, set: &VertexSet) -> bool {
        let mut it = set.iter();
        let Some(&first) = it.next() else { return true };
        if !self.has_vertex(first) {
            return set.len() <= 1;
        }
        let reach = self.reachable_from(first);
        set.iter().all(|v| reach.contains(v))
    }

    pub fn reachable_from(&self, start: VertexId) -> VertexSet {
        let mut seen = VertexSet::new();
        if !self.has_vertex(start) {
            return seen;
        }
        seen.insert(start);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for e in &self.adj[&x] {
                let y = self.edges[e].other(x);
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Edges with exactly one endpoint in `side`.
    pub fn boundary(&self, side: &VertexSet) -> EdgeSet {
        self.edges()
            .filter(|(_, e)| side.contains(&e.u) != side.contains(&e.v))
            .map(|(id, _)| id)
            .collect()
    }
}

/// Disjoint terminal groups plus a reserve set disjoint from all of them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerminalSystem {
    pub groups: Vec<VertexSet>,
    pub reserve: VertexSet,
}

impl TerminalSystem {
    pub fn new(groups: Vec<VertexSet>, reserve: VertexSet) -> Self {
        TerminalSystem { groups, reserve }
    }

    pub fn single(group: VertexSet) -> Self {
        TerminalSystem { groups: vec![group], reserve: VertexSet::new() }
    }

    pub fn terminals(&self) -> VertexSet {
        self.groups.iter().flatten().copied().collect()
    }

    /// Checks the structural invariants against `g`.
    pub fn validate(&self, g: &MultiGraph) -> Result<()> {
        let mut seen = VertexSet::new();
        for (i, grp) in self.groups.iter().enumerate() {
            if grp.is_empty() {
                return Err(Error::Invalid(format!("group {i} is empty")));
            }
            for &v in grp {
                g.check_vertex(v)?;
                if !seen.insert(v) {
                    return Err(Error::Invalid(format!("vertex {v} appears in more than one group")));
                }
            }
        }
        for &r in &self.reserve {
            g.check_vertex(r)?;
            if seen.contains(&r) {
                return Err(Error::Invalid(format!("reserve vertex {r} is also a terminal")));
            }
        }
        Ok(())
    }
}
