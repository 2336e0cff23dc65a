//! Seeded instance generators for sweeps and property checks.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::connectivity::{steiner_connectivity, PathSystem};
use crate::error::Result;
use crate::graph::{EdgeId, EdgeSet, MultiGraph, TerminalSystem, VertexId, VertexSet};

/// Loopless multigraph on `n` vertices with `m` edges drawn uniformly from
/// the vertex pairs (with repetition).
pub fn random_multigraph<R: Rng>(rng: &mut R, n: usize, m: usize) -> (MultiGraph, Vec<VertexId>) {
    let mut g = MultiGraph::new();
    let vs: Vec<VertexId> = (0..n).map(|_| g.add_vertex()).collect();
    if n >= 2 {
        for _ in 0..m {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            g.add_edge(vs[a], vs[b]).expect("live vertices");
        }
    }
    (g, vs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceParams {
    pub n: usize,
    /// Expected multiplicity of each vertex pair.
    pub density: f64,
    /// Number of terminal groups; one group covering every vertex when 1
    /// and `group_size` is 0.
    pub groups: usize,
    pub group_size: usize,
    /// Required Steiner connectivity of every group.
    pub min_connectivity: u64,
    pub max_tries: usize,
}

impl InstanceParams {
    pub fn edge_count(&self) -> usize {
        let pairs = self.n * self.n.saturating_sub(1) / 2;
        (pairs as f64 * self.density).round() as usize
    }
}

/// Random instance whose groups all meet `min_connectivity`, or `None`
/// after `max_tries` rejected draws.
pub fn random_instance<R: Rng>(rng: &mut R, p: &InstanceParams) -> Result<Option<(MultiGraph, TerminalSystem)>> {
    for _ in 0..p.max_tries.max(1) {
        let (g, mut vs) = random_multigraph(rng, p.n, p.edge_count());
        let groups: Vec<VertexSet> = if p.group_size == 0 {
            vec![vs.iter().copied().collect()]
        } else {
            vs.shuffle(rng);
            vs.chunks(p.group_size)
                .take(p.groups)
                .filter(|c| c.len() == p.group_size)
                .map(|c| c.iter().copied().collect())
                .collect()
        };
        if groups.len() < p.groups.min(1) {
            continue;
        }
        let mut ok = true;
        for grp in &groups {
            if grp.len() > 1 && steiner_connectivity(&g, grp)?.0 < p.min_connectivity {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(Some((g, TerminalSystem::new(groups, VertexSet::new()))));
        }
    }
    Ok(None)
}

/// Instance shaped for the tree-packing lemma: `S` joined so it is
/// `3k`-edge-connected, each other vertex adjacent to `S` only and of degree
/// 3, and a set `T` of at most `k` edges to delete.
#[derive(Clone, Debug)]
pub struct TreePackingInstance {
    pub graph: MultiGraph,
    pub s: VertexSet,
    pub t: EdgeSet,
    pub k: usize,
}

pub fn tree_packing_instance<R: Rng>(rng: &mut R, k: usize, s_size: usize, others: usize) -> Result<TreePackingInstance> {
    let mut g = MultiGraph::new();
    let s_vec: Vec<VertexId> = (0..s_size).map(|_| g.add_vertex()).collect();
    let s: VertexSet = s_vec.iter().copied().collect();
    for _ in 0..others {
        let w = g.add_vertex();
        for _ in 0..3 {
            let t = s_vec[rng.gen_range(0..s_size)];
            g.add_edge(w, t)?;
        }
    }
    // S-S edges until S is 3k-connected
    if s_size >= 2 {
        while steiner_connectivity(&g, &s)?.0 < 3 * k as u64 {
            let a = rng.gen_range(0..s_size);
            let mut b = rng.gen_range(0..s_size - 1);
            if b >= a {
                b += 1;
            }
            g.add_edge(s_vec[a], s_vec[b])?;
        }
    }
    let mut ids: Vec<EdgeId> = g.edge_ids().collect();
    ids.shuffle(rng);
    let take = rng.gen_range(0..=k);
    let t = ids.into_iter().take(take).collect();
    Ok(TreePackingInstance { graph: g, s, t, k })
}

impl TreePackingInstance {
    /// The graph with `T` deleted.
    pub fn reduced(&self) -> MultiGraph {
        let mut h = self.graph.clone();
        for &e in &self.t {
            h.remove_edge(e).expect("T holds live edges");
        }
        h
    }
}

/// Two path systems of equal size from `v1` and `v2`, paired so partners
/// end at the same vertex.
#[derive(Clone, Debug)]
pub struct CommonPathInstance {
    pub graph: MultiGraph,
    pub v1: VertexId,
    pub v2: VertexId,
    pub sys1: PathSystem,
    pub sys2: PathSystem,
    pub pairing: Vec<usize>,
}

/// Builds `count` common paths over a pool of `pool` vertices. Paths inside
/// one system use fresh edges; a path of the second system often merges into
/// its partner and shares that partner's tail.
pub fn common_path_instance<R: Rng>(rng: &mut R, count: usize, pool: usize) -> Result<CommonPathInstance> {
    let pool = pool.max(3);
    let mut g = MultiGraph::new();
    let vs: Vec<VertexId> = (0..pool).map(|_| g.add_vertex()).collect();
    let (v1, v2) = (vs[0], vs[1]);
    let mut paths1 = Vec::with_capacity(count);
    let mut paths2 = Vec::with_capacity(count);
    let pick = |rng: &mut R| vs[rng.gen_range(0..pool)];
    for _ in 0..count {
        let end = match rng.gen_range(0..8) {
            0 => v1,
            1 => v2,
            _ => pick(rng),
        };
        let route1 = route(rng, v1, end, &pick);
        let edges1 = lay(&mut g, &route1)?;
        let (route2_head, tail): (Vec<VertexId>, Vec<EdgeId>) = if rng.gen_bool(0.5) && edges1.len() > 1 {
            let cut = rng.gen_range(1..edges1.len());
            (route(rng, v2, route1[cut], &pick), edges1[cut..].to_vec())
        } else {
            (route(rng, v2, end, &pick), Vec::new())
        };
        let mut edges2 = lay(&mut g, &route2_head)?;
        edges2.extend(tail);
        paths1.push(edges1);
        paths2.push(edges2);
    }
    for _ in 0..pool {
        let (a, b) = (pick(rng), pick(rng));
        if a != b {
            g.add_edge(a, b)?;
        }
    }
    let mut order: Vec<usize> = (0..count).collect();
    order.shuffle(rng);
    // sys2 position order[i] holds the partner of sys1 path i
    let mut shuffled = vec![Vec::new(); count];
    for (i, p) in paths2.into_iter().enumerate() {
        shuffled[order[i]] = p;
    }
    Ok(CommonPathInstance {
        graph: g,
        v1,
        v2,
        sys1: PathSystem::new(v1, None, paths1),
        sys2: PathSystem::new(v2, None, shuffled),
        pairing: order,
    })
}

// Vertex route from `a` to `b` through up to two random intermediates,
// with consecutive repeats removed.
fn route<R: Rng>(rng: &mut R, a: VertexId, b: VertexId, pick: &impl Fn(&mut R) -> VertexId) -> Vec<VertexId> {
    let mut r = vec![a];
    for _ in 0..rng.gen_range(0..=2) {
        r.push(pick(rng));
    }
    r.push(b);
    r.dedup();
    r
}

fn lay(g: &mut MultiGraph, route: &[VertexId]) -> Result<Vec<EdgeId>> {
    route.windows(2).map(|w| g.add_edge(w[0], w[1])).collect()
}

/// Loopless graph with a vertex `x` that is not a cut vertex, has degree
/// at least 4 and at least two neighbours, on `n` vertices. Gives up after
/// 1000 draws.
pub fn splitting_instance<R: Rng>(rng: &mut R, n: usize, m: usize) -> Option<(MultiGraph, VertexId)> {
    for _ in 0..1000 {
        let (g, vs) = random_multigraph(rng, n, m);
        let x = vs[0];
        let deg = g.degree(x).unwrap_or(0);
        let nbrs = g.neighbors(x).map(|s| s.len()).unwrap_or(0);
        if deg >= 4 && nbrs >= 2 && g.is_connected() && !g.is_cut_vertex(x).unwrap_or(true) {
            return Some((g, x));
        }
    }
    None
}
