//! Brute-force oracles shared by the integration tests. None of them call
//! the flow or search code they are checked against.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use forestpack::packing::{verify_packing, PackOptions, Packing};
use forestpack::{EdgeId, EdgeSet, MultiGraph, TerminalSystem, VertexId, VertexSet};

pub fn graph(n: usize, edges: &[(usize, usize)]) -> (MultiGraph, Vec<VertexId>, Vec<EdgeId>) {
    let mut g = MultiGraph::new();
    let vs: Vec<_> = (0..n).map(|_| g.add_vertex()).collect();
    let es = edges.iter().map(|&(a, b)| g.add_edge(vs[a], vs[b]).unwrap()).collect();
    (g, vs, es)
}

/// Dense view: vertex indices and edge endpoint pairs.
pub struct Dense {
    pub verts: Vec<VertexId>,
    pub index: BTreeMap<VertexId, usize>,
    pub ids: Vec<EdgeId>,
    pub ends: Vec<(usize, usize)>,
}

impl Dense {
    pub fn new(g: &MultiGraph) -> Self {
        let verts: Vec<VertexId> = g.vertices().collect();
        let index: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut ids = Vec::new();
        let mut ends = Vec::new();
        for (id, e) in g.edges() {
            ids.push(id);
            ends.push((index[&e.u], index[&e.v]));
        }
        Dense { verts, index, ids, ends }
    }

    pub fn mask_of(&self, set: &VertexSet) -> u32 {
        set.iter().fold(0, |m, v| m | 1 << self.index[v])
    }

    /// Number of edges with exactly one end in `side`.
    pub fn cut(&self, side: u32) -> u64 {
        self.ends.iter().filter(|&&(u, v)| (side >> u & 1) != (side >> v & 1)).count() as u64
    }

    /// True when every group lies in one component of the edges in `mask`.
    pub fn connects(&self, mask: u64, groups: &[u32]) -> bool {
        assert!(self.ids.len() <= 64);
        let n = self.verts.len();
        let mut p: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (i, &(u, v)) in self.ends.iter().enumerate() {
            if mask >> i & 1 == 1 {
                let (a, b) = (find(&mut p, u), find(&mut p, v));
                p[a] = b;
            }
        }
        groups.iter().all(|&gm| {
            let mut root = None;
            (0..n).filter(|&i| gm >> i & 1 == 1).all(|i| {
                let r = find(&mut p, i);
                *root.get_or_insert(r) == r
            })
        })
    }
}

/// Minimum number of edges separating `s`, over all vertex bipartitions.
pub fn brute_steiner(g: &MultiGraph, s: &VertexSet) -> u64 {
    let d = Dense::new(g);
    let n = d.verts.len();
    let sm = d.mask_of(s);
    let low = sm & sm.wrapping_neg();
    (0u32..1 << n)
        .filter(|&side| side & low != 0 && side & sm != sm)
        .map(|side| d.cut(side))
        .min()
        .unwrap()
}

/// Minimum cut keeping every group whole and separating two of them.
pub fn brute_separating(g: &MultiGraph, ts: &TerminalSystem) -> u64 {
    let d = Dense::new(g);
    let n = d.verts.len();
    let gm: Vec<u32> = ts.groups.iter().map(|grp| d.mask_of(grp)).collect();
    (0u32..1 << n)
        .filter(|&side| {
            gm.iter().all(|&m| side & m == 0 || side & m == m)
                && gm.iter().any(|&m| m & !side == 0)
                && gm.iter().any(|&m| side & m == 0)
        })
        .map(|side| d.cut(side))
        .min()
        .unwrap()
}

/// Local edge-connectivity of every pair, by enumerating bipartitions.
pub fn brute_local(g: &MultiGraph) -> BTreeMap<(VertexId, VertexId), u64> {
    let d = Dense::new(g);
    let n = d.verts.len();
    let mut best = vec![u64::MAX; n * n];
    for side in 1u32..(1 << n) - 1 {
        if side & 1 == 0 {
            continue;
        }
        let c = d.cut(side);
        for a in 0..n {
            for b in a + 1..n {
                if (side >> a & 1) != (side >> b & 1) && c < best[a * n + b] {
                    best[a * n + b] = c;
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for a in 0..n {
        for b in a + 1..n {
            out.insert((d.verts[a], d.verts[b]), best[a * n + b]);
        }
    }
    out
}

/// Whether `k` disjoint edge sets each connecting every group exist, by
/// enumerating edge subsets. Needs at most 20 edges.
pub fn naive_packable(g: &MultiGraph, ts: &TerminalSystem, k: usize) -> bool {
    let d = Dense::new(g);
    let m = d.ids.len();
    assert!(m <= 20);
    let groups: Vec<u32> = ts.groups.iter().filter(|grp| grp.len() > 1).map(|grp| d.mask_of(grp)).collect();
    let good: Vec<bool> = (0u32..1 << m).map(|mask| d.connects(mask as u64, &groups)).collect();
    fn rec(k: usize, avail: u32, good: &[bool], memo: &mut HashMap<(usize, u32), bool>) -> bool {
        if k == 0 {
            return true;
        }
        if !good[avail as usize] {
            return false;
        }
        if k == 1 {
            return true;
        }
        if let Some(&r) = memo.get(&(k, avail)) {
            return r;
        }
        let mut sub = avail;
        let mut found = false;
        while sub > 0 {
            if good[sub as usize] && rec(k - 1, avail & !sub, good, memo) {
                found = true;
                break;
            }
            sub = (sub - 1) & avail;
        }
        memo.insert((k, avail), found);
        found
    }
    rec(k, (1u32 << m) - 1, &good, &mut HashMap::new())
}

/// Whether some assignment of edges to `k` classes (or to none) passes the
/// verifier under `opts`. Enumerates all `(k+1)^m` assignments.
pub fn naive_constrained(g: &MultiGraph, ts: &TerminalSystem, k: usize, opts: &PackOptions) -> bool {
    let ids: Vec<EdgeId> = g.edge_ids().collect();
    let m = ids.len();
    let total = (k as u64 + 1).pow(m as u32);
    assert!(total <= 5_000_000);
    let mut check = opts.clone();
    check.budget = 0;
    (0..total).any(|mut code| {
        let mut classes = vec![EdgeSet::new(); k];
        for &e in &ids {
            let c = (code % (k as u64 + 1)) as usize;
            code /= k as u64 + 1;
            if c > 0 {
                classes[c - 1].insert(e);
            }
        }
        verify_packing(g, ts, &Packing::new(classes), &check).passed()
    })
}

/// Minimum total length of `f` edge-disjoint `s`-`t` paths over all
/// tuples of simple paths, or `None` if there are not `f` of them.
pub fn brute_min_cost(g: &MultiGraph, s: VertexId, t: VertexId, f: usize) -> Option<usize> {
    let d = Dense::new(g);
    let mut paths: Vec<u64> = Vec::new();
    fn dfs(d: &Dense, at: usize, t: usize, seen: u32, used: u64, out: &mut Vec<u64>) {
        if at == t {
            out.push(used);
            return;
        }
        for (i, &(u, v)) in d.ends.iter().enumerate() {
            if u == v {
                continue;
            }
            let next = if u == at {
                v
            } else if v == at {
                u
            } else {
                continue;
            };
            if seen >> next & 1 == 0 {
                dfs(d, next, t, seen | 1 << next, used | 1 << i, out);
            }
        }
    }
    let (si, ti) = (d.index[&s], d.index[&t]);
    dfs(&d, si, ti, 1 << si, 0, &mut paths);
    fn best(paths: &[u64], from: usize, f: usize, used: u64) -> Option<usize> {
        if f == 0 {
            return Some(0);
        }
        let mut out: Option<usize> = None;
        for i in from..paths.len() {
            if paths[i] & used == 0 {
                if let Some(rest) = best(paths, i + 1, f - 1, used | paths[i]) {
                    let c = paths[i].count_ones() as usize + rest;
                    out = Some(out.map_or(c, |o| o.min(c)));
                }
            }
        }
        out
    }
    best(&paths, 0, f, 0)
}

/// Stirling number of the second kind.
pub fn stirling2(n: u64, k: u64) -> u64 {
    if n == 0 && k == 0 {
        return 1;
    }
    if n == 0 || k == 0 {
        return 0;
    }
    k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)
}

/// Admissible partitions of `n` vertices with `s` terminals: the terminals
/// split into `l` blocks and every other vertex joins one of them or stays
/// outside.
pub fn admissible_count(n: u64, s: u64) -> u64 {
    (1..=s).map(|l| stirling2(s, l) * (l + 1).pow((n - s) as u32)).sum()
}

/// One run of the cut-contract-pack-extend-merge pipeline.
pub struct EdgeUnionCase {
    pub graph: MultiGraph,
    pub s: VertexSet,
    pub inner: Vec<EdgeSet>,
    pub outer: Vec<EdgeSet>,
    pub merged: Vec<MultiGraph>,
}

/// Cuts a random graph into `C1` and `C2`, packs `S2 + v1` on the side with
/// `C1` contracted, extends the induced labels at `v2` on the other side and
/// merges. `None` when either packing does not exist.
pub fn edge_union_case<R: rand::Rng>(rng: &mut R, k: usize) -> Option<EdgeUnionCase> {
    use forestpack::generate::random_multigraph;
    use forestpack::packing::{exact_pack, EdgeSubpartition};
    use forestpack::transforms::edge_union;
    use rand::seq::SliceRandom;

    let n = rng.gen_range(5..=8);
    let m = rng.gen_range(n * k + n..=n * (2 * k + 1));
    let (g, mut vs) = random_multigraph(rng, n, m);
    vs.shuffle(rng);
    let c1_size = rng.gen_range(1..n);
    let c1: VertexSet = vs[..c1_size].iter().copied().collect();
    let c2: VertexSet = vs[c1_size..].iter().copied().collect();
    let s: VertexSet = vs.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    if s.len() < 2 || g.boundary(&c1).is_empty() {
        return None;
    }
    let (g1, v2, _) = g.contract(&c2).ok()?;
    let (g2, v1, _) = g.contract(&c1).ok()?;

    let mut grp2: VertexSet = s.intersection(&c2).copied().collect();
    grp2.insert(v1);
    let opts = PackOptions::with_budget(200_000);
    let (out2, _) = exact_pack(&g2, &TerminalSystem::single(grp2), k, &opts).ok()?;
    let outer = out2.packing()?.classes.clone();

    let sp = EdgeSubpartition::induced(&g1, v2, &outer).ok()?;
    let mut grp1: VertexSet = s.intersection(&c1).copied().collect();
    grp1.insert(v2);
    let opts1 = PackOptions { extend: Some(sp), budget: 200_000, ..Default::default() };
    let (out1, _) = exact_pack(&g1, &TerminalSystem::single(grp1), k, &opts1).ok()?;
    let inner = out1.packing()?.classes.clone();

    let merged = (0..k).map(|i| edge_union(&g, &outer[i], &inner[i]).unwrap()).collect();
    Some(EdgeUnionCase { graph: g, s, inner, outer, merged })
}
