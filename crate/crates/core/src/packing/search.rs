//! Exact backtracking packer for desk-scale instances.
//!
//! Each edge is either committed to one class or still open, with a set of
//! classes it may no longer join; open edges end up unused. Every class
//! carries connectivity demands (each terminal group, and the far ends of its
//! edges at the extension vertex with that vertex removed). A node picks the
//! unsatisfied demand whose minimum cut in the class's available edges is
//! smallest and branches over the cut: branch `j` commits the `j`-th cut edge
//! to the class and forbids the earlier ones.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{verify_packing, EdgeSubpartition, PackOptions, Packing, PackingMeta};
use crate::error::{Error, Result};
use crate::flow::{FlowNet, INF_CAP};
use crate::graph::{EdgeId, EdgeKind, EdgeSet, MultiGraph, TerminalSystem, VertexId, VertexSet};

const OPEN: u8 = u8::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExactOutcome {
    Feasible(Packing),
    Infeasible,
    Timeout,
}

impl ExactOutcome {
    pub fn packing(&self) -> Option<&Packing> {
        match self {
            ExactOutcome::Feasible(p) => Some(p),
            _ => None,
        }
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            ExactOutcome::Feasible(_) => "FEASIBLE",
            ExactOutcome::Infeasible => "INFEASIBLE",
            ExactOutcome::Timeout => "TIMEOUT",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
}

/// Search switches; symmetry breaking is on by default.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub break_symmetry: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { break_symmetry: true }
    }
}

/// Finds `k` edge-disjoint classes each connecting every terminal group,
/// subject to `opts`. A budget of 0 means unlimited.
pub fn exact_pack(
    g: &MultiGraph,
    ts: &TerminalSystem,
    k: usize,
    opts: &PackOptions,
) -> Result<(ExactOutcome, SearchStats)> {
    exact_pack_with(g, ts, k, opts, SearchConfig::default())
}

pub fn exact_pack_with(
    g: &MultiGraph,
    ts: &TerminalSystem,
    k: usize,
    opts: &PackOptions,
    cfg: SearchConfig,
) -> Result<(ExactOutcome, SearchStats)> {
    ts.validate(g)?;
    if k >= 64 {
        return Err(Error::TooLarge { size: k, bound: 63 });
    }
    if let Some(sp) = &opts.extend {
        check_subpartition(g, sp, k)?;
    }
    for &w in &opts.balance {
        g.check_vertex(w)?;
    }

    let mut s = Searcher::new(g, ts, k, opts, cfg);
    let found = match s.initial_state() {
        Some(mut st) => s.run(&mut st),
        None => Some(false),
    };
    let stats = SearchStats { nodes: s.nodes };
    let outcome = match found {
        None => ExactOutcome::Timeout,
        Some(false) => ExactOutcome::Infeasible,
        Some(true) => {
            let p = s.finish(s.solution.clone().expect("solution recorded"));
            let report = verify_packing(g, ts, &p, opts);
            assert!(report.passed(), "search produced an invalid packing: {report:?}");
            ExactOutcome::Feasible(p)
        }
    };
    Ok((outcome, stats))
}

fn check_subpartition(g: &MultiGraph, sp: &EdgeSubpartition, k: usize) -> Result<()> {
    if sp.k != k {
        return Err(Error::SizeMismatch(format!("subpartition has {} parts, packing needs {k}", sp.k)));
    }
    let inc = g.incident(sp.at)?;
    for (&e, &l) in &sp.label {
        if l > k {
            return Err(Error::Invalid(format!("label {l} exceeds k = {k}")));
        }
        if l > 0 && !inc.contains(&e) {
            return Err(Error::Invalid(format!("edge {e} is not incident to {}", sp.at)));
        }
    }
    Ok(())
}

#[derive(Clone)]
struct State {
    // class (0-based) for committed edges, OPEN otherwise
    owner: Vec<u8>,
    // classes an open edge may not join
    banned: Vec<u64>,
}

struct Searcher {
    n: usize,
    k: usize,
    ends: Vec<(usize, usize)>,
    ids: Vec<EdgeId>,
    inc: Vec<Vec<usize>>,
    groups: Vec<Vec<usize>>,
    at: Option<usize>,
    pinned: u64,
    balance: Vec<usize>,
    budget: u64,
    nodes: u64,
    break_symmetry: bool,
    // edges allowed in no class
    blocked: Vec<bool>,
    fake: Vec<bool>,
    at_id: Option<VertexId>,
    balance_ids: VertexSet,
    prefix: Vec<(usize, usize)>,
    solution: Option<Vec<u8>>,
}

// Union-find over vertex indices.
struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a] = b;
        }
    }
}

enum Demand {
    Met,
    Broken,
    // terminals in vertex indices, with the excluded vertex if any
    Open(Vec<usize>, Option<usize>),
}

impl Searcher {
    fn new(g: &MultiGraph, ts: &TerminalSystem, k: usize, opts: &PackOptions, cfg: SearchConfig) -> Self {
        let verts: Vec<VertexId> = g.vertices().collect();
        let index: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut ends = Vec::new();
        let mut ids = Vec::new();
        let mut inc = vec![Vec::new(); verts.len()];
        let mut blocked = Vec::new();
        let mut fake = Vec::new();
        let mut prefix = Vec::new();
        for (id, e) in g.edges() {
            let (u, v) = (index[&e.u], index[&e.v]);
            let ei = ids.len();
            ids.push(id);
            ends.push((u, v));
            inc[u].push(ei);
            if u != v {
                inc[v].push(ei);
            }
            blocked.push(opts.forbid_fake && e.kind != EdgeKind::Original);
            fake.push(e.kind != EdgeKind::Original);
        }
        let edge_index: BTreeMap<EdgeId, usize> = ids.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut pinned = 0u64;
        let at = opts.extend.as_ref().map(|sp| {
            for (e, &l) in &sp.label {
                if l > 0 {
                    prefix.push((edge_index[e], l - 1));
                    pinned |= 1 << (l - 1);
                }
            }
            index[&sp.at]
        });
        let groups = ts
            .groups
            .iter()
            .filter(|grp| grp.len() > 1)
            .map(|grp| grp.iter().map(|v| index[v]).collect())
            .collect();
        let balance = opts.balance.iter().map(|v| index[v]).collect();
        Searcher {
            n: verts.len(),
            k,
            ends,
            ids,
            inc,
            groups,
            at,
            pinned,
            balance,
            budget: opts.budget,
            nodes: 0,
            break_symmetry: cfg.break_symmetry,
            blocked,
            fake,
            at_id: opts.extend.as_ref().map(|sp| sp.at),
            balance_ids: opts.balance.clone(),
            prefix,
            solution: None,
        }
    }

    fn initial_state(&self) -> Option<State> {
        let m = self.ends.len();
        let all = if self.k == 0 { 0 } else { u64::MAX >> (64 - self.k) };
        let mut st = State {
            owner: vec![OPEN; m],
            banned: (0..m).map(|e| if self.blocked[e] { all } else { 0 }).collect(),
        };
        for &(e, c) in &self.prefix {
            if self.blocked[e] {
                return None;
            }
            st.owner[e] = c as u8;
        }
        Some(st)
    }

    fn allowed(&self, st: &State, e: usize, c: usize) -> bool {
        st.owner[e] == c as u8 || (st.owner[e] == OPEN && st.banned[e] & (1 << c) == 0)
    }

    fn components(&self, st: &State, c: usize, committed_only: bool, skip: Option<usize>) -> Dsu {
        let mut d = Dsu::new(self.n);
        for (e, &(u, v)) in self.ends.iter().enumerate() {
            if u == v || Some(u) == skip || Some(v) == skip {
                continue;
            }
            let ok = if committed_only { st.owner[e] == c as u8 } else { self.allowed(st, e, c) };
            if ok {
                d.union(u, v);
            }
        }
        d
    }

    // Far ends of class-c edges at the extension vertex.
    fn extension_targets(&self, st: &State, c: usize) -> Vec<usize> {
        let Some(at) = self.at else { return Vec::new() };
        let mut out: Vec<usize> = self.inc[at]
            .iter()
            .filter(|&&e| st.owner[e] == c as u8)
            .filter_map(|&e| {
                let (u, v) = self.ends[e];
                (u != v).then_some(if u == at { v } else { u })
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn demand_status(&self, st: &State, c: usize, terms: &[usize], skip: Option<usize>) -> Demand {
        if terms.len() < 2 {
            return Demand::Met;
        }
        let mut done = self.components(st, c, true, skip);
        let r = done.find(terms[0]);
        if terms.iter().all(|&t| done.find(t) == r) {
            return Demand::Met;
        }
        let mut avail = self.components(st, c, false, skip);
        let r = avail.find(terms[0]);
        if terms.iter().any(|&t| avail.find(t) != r) {
            return Demand::Broken;
        }
        Demand::Open(terms.to_vec(), skip)
    }

    fn balance_ok(&self, st: &State) -> bool {
        self.balance.iter().all(|&w| {
            let mut per = vec![0usize; self.k];
            let mut free = 0usize;
            for &e in &self.inc[w] {
                match st.owner[e] {
                    OPEN => free += 1,
                    c => per[c as usize] += 1,
                }
            }
            let needed: usize = per.iter().map(|&s| 2usize.saturating_sub(s)).sum();
            free >= needed
        })
    }

    // Minimum cut for an open demand of class c, below `limit`: open edges
    // allowed in c that cross it, in edge-id order.
    fn demand_cut(&self, st: &State, c: usize, terms: &[usize], skip: Option<usize>, limit: u64) -> Option<Vec<usize>> {
        let mut net = FlowNet::new(self.n);
        let mut arcs = Vec::new();
        for (e, &(u, v)) in self.ends.iter().enumerate() {
            if u == v || Some(u) == skip || Some(v) == skip {
                continue;
            }
            if st.owner[e] == c as u8 {
                net.add_undirected(u, v, INF_CAP);
            } else if self.allowed(st, e, c) {
                arcs.push(e);
                net.add_undirected(u, v, 1);
            }
        }
        // the smallest cut separating terms[0] from any other committed piece
        let mut done = self.components(st, c, true, skip);
        let r = done.find(terms[0]);
        let mut roots = vec![r];
        let mut best: Option<(u64, Vec<bool>)> = None;
        let mut is_sink = vec![false; self.n];
        for &t in terms {
            let rt = done.find(t);
            if roots.contains(&rt) {
                continue;
            }
            roots.push(rt);
            let bound = best.as_ref().map_or(limit, |b| b.0);
            net.reset();
            is_sink[t] = true;
            let flow = net.max_flow(&[terms[0]], &is_sink, bound);
            is_sink[t] = false;
            if flow < bound {
                best = Some((flow, net.source_side(&[terms[0]])));
            }
        }
        let (_, side) = best?;
        Some(arcs.into_iter().filter(|&e| side[self.ends[e].0] != side[self.ends[e].1]).collect())
    }

    // Classes that are interchangeable: unpinned, nothing committed or banned.
    fn blank_classes(&self, st: &State) -> u64 {
        let mut touched = self.pinned;
        for e in 0..st.owner.len() {
            if st.owner[e] != OPEN {
                touched |= 1 << st.owner[e];
            } else if !self.blocked[e] {
                touched |= st.banned[e];
            }
        }
        let all = if self.k == 0 { 0 } else { u64::MAX >> (64 - self.k) };
        all & !touched
    }

    /// `Some(true)` on success, `Some(false)` when exhausted, `None` on budget.
    fn run(&mut self, st: &mut State) -> Option<bool> {
        self.nodes += 1;
        if self.budget > 0 && self.nodes > self.budget {
            return None;
        }
        if !self.balance_ok(st) {
            return Some(false);
        }
        let mut best: Option<(usize, Vec<usize>)> = None;
        for c in 0..self.k {
            let ext = self.extension_targets(st, c);
            let demands = self
                .groups
                .iter()
                .map(|grp| (grp.as_slice(), None))
                .chain(std::iter::once((ext.as_slice(), self.at)));
            for (terms, skip) in demands {
                match self.demand_status(st, c, terms, skip) {
                    Demand::Met => {}
                    Demand::Broken => return Some(false),
                    Demand::Open(terms, skip) => {
                        let limit = best.as_ref().map_or(u64::MAX, |b| b.1.len() as u64);
                        if let Some(cut) = self.demand_cut(st, c, &terms, skip, limit) {
                            best = Some((c, cut));
                        }
                    }
                }
            }
        }
        let Some((c, cut)) = best else {
            self.solution = Some(st.owner.clone());
            return Some(true);
        };
        let bit = 1u64 << c;
        let others = if self.break_symmetry && self.blank_classes(st) & bit != 0 {
            self.blank_classes(st) & !bit
        } else {
            0
        };
        let keys: Vec<_> = cut
            .iter()
            .map(|&e| {
                let (u, v) = self.ends[e];
                (u.min(v), u.max(v), self.fake[e], st.banned[e])
            })
            .collect();
        for j in 0..cut.len() {
            // parallel edges in the same state lead to the same subtree
            if keys[..j].contains(&keys[j]) {
                continue;
            }
            let mut next = st.clone();
            for &e in &cut[..j] {
                next.banned[e] |= bit | others;
            }
            next.owner[cut[j]] = c as u8;
            match self.run(&mut next) {
                Some(false) => {}
                r => return r,
            }
        }
        Some(false)
    }

    fn finish(&self, owner: Vec<u8>) -> Packing {
        let mut classes = vec![EdgeSet::new(); self.k];
        for (e, &c) in owner.iter().enumerate() {
            if c != OPEN {
                classes[c as usize].insert(self.ids[e]);
            }
        }
        // unpinned classes are interchangeable; order them by smallest edge id
        let free: Vec<usize> = (0..self.k).filter(|c| self.pinned & (1 << c) == 0).collect();
        let mut sorted: Vec<EdgeSet> = free.iter().map(|&c| std::mem::take(&mut classes[c])).collect();
        sorted.sort_by_key(|s| s.first().map_or(u64::MAX, |e| e.0));
        for (&c, s) in free.iter().zip(sorted) {
            classes[c] = s;
        }
        let mut p = Packing::new(classes);
        p.extended_at = self.at_id;
        p.meta = PackingMeta {
            balanced: self.balance_ids.clone(),
            fake_used: owner.iter().enumerate().any(|(e, &c)| c != OPEN && self.fake[e]),
        };
        p
    }
}
