//! Packings of edge-disjoint subgraphs and the constraints placed on them.
//!
//! A [`Packing`] is `k` pairwise disjoint edge sets ("classes"). Class `i`
//! (zero based) corresponds to label `i + 1` of an [`EdgeSubpartition`]; label
//! 0 means "unlabeled". A packing *extends* a subpartition at `v` when every
//! class contains its prescribed part and `v` is not a cut vertex of the
//! class, and it *balances* `v` when the labels it induces on the edges at
//! `v` can be completed to a partition with every part of size at least two.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeKind, EdgeSet, MultiGraph, TerminalSystem, VertexId, VertexSet};

mod decompose;
mod search;
mod spanning;

pub use decompose::{decompose_and_pack, BaseSolver, DecomposeConfig, DecomposeOutcome, TraceStep};
pub use search::{exact_pack, ExactOutcome, SearchStats};
pub use spanning::{pack_spanning_trees, SpanningOutcome};

/// Labels on the edges at one vertex. Every edge at `at` has an entry;
/// unlabeled edges carry 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSubpartition {
    pub at: VertexId,
    pub k: usize,
    pub label: BTreeMap<EdgeId, usize>,
}

impl EdgeSubpartition {
    /// All edges at `at` unlabeled.
    pub fn unlabeled(g: &MultiGraph, at: VertexId, k: usize) -> Result<Self> {
        let label = g.incident(at)?.iter().map(|&e| (e, 0)).collect();
        Ok(EdgeSubpartition { at, k, label })
    }

    /// Subpartition with the given labels; edges at `at` not listed are unlabeled.
    pub fn from_labels(
        g: &MultiGraph,
        at: VertexId,
        k: usize,
        labels: impl IntoIterator<Item = (EdgeId, usize)>,
    ) -> Result<Self> {
        let mut sp = Self::unlabeled(g, at, k)?;
        for (e, l) in labels {
            sp.set_label(e, l)?;
        }
        Ok(sp)
    }

    /// The subpartition a family of classes induces at `at`.
    pub fn induced(g: &MultiGraph, at: VertexId, classes: &[EdgeSet]) -> Result<Self> {
        let mut sp = Self::unlabeled(g, at, classes.len())?;
        for (i, class) in classes.iter().enumerate() {
            for e in class {
                if let Some(slot) = sp.label.get_mut(e) {
                    *slot = i + 1;
                }
            }
        }
        Ok(sp)
    }

    pub fn set_label(&mut self, e: EdgeId, l: usize) -> Result<()> {
        if l > self.k {
            return Err(Error::Invalid(format!("label {l} exceeds k = {}", self.k)));
        }
        match self.label.get_mut(&e) {
            Some(slot) => {
                *slot = l;
                Ok(())
            }
            None => Err(Error::Invalid(format!("edge {e} is not incident to {}", self.at))),
        }
    }

    /// Part `i` for `i` in `1..=k`.
    pub fn part(&self, i: usize) -> EdgeSet {
        self.label.iter().filter(|(_, &l)| l == i).map(|(&e, _)| e).collect()
    }

    /// Parts `1..=k` in order.
    pub fn parts(&self) -> Vec<EdgeSet> {
        let mut parts = vec![EdgeSet::new(); self.k];
        for (&e, &l) in &self.label {
            if l > 0 {
                parts[l - 1].insert(e);
            }
        }
        parts
    }

    pub fn unlabeled_edges(&self) -> EdgeSet {
        self.part(0)
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        self.parts().iter().map(EdgeSet::len).collect()
    }
}

/// Whether the subpartition can be completed to a partition of all edges at
/// `sp.at` into `k` parts of size at least two. Unlabeled edges are
/// interchangeable fillers, so this is the counting test
/// `#unlabeled >= sum_i max(0, 2 - |P_i|)`.
pub fn is_balanced_subpartition(g: &MultiGraph, sp: &EdgeSubpartition) -> bool {
    let Ok(inc) = g.incident(sp.at) else { return false };
    let mut sizes = vec![0usize; sp.k];
    let mut labeled = 0usize;
    for (e, &l) in &sp.label {
        if l == 0 {
            continue;
        }
        if l > sp.k || !inc.contains(e) {
            return false;
        }
        sizes[l - 1] += 1;
        labeled += 1;
    }
    if sp.k == 0 {
        return inc.is_empty();
    }
    let unlabeled = inc.len() - labeled;
    let needed: usize = sizes.iter().map(|&s| 2usize.saturating_sub(s)).sum();
    unlabeled >= needed
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingMeta {
    pub balanced: VertexSet,
    pub fake_used: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packing {
    pub k: usize,
    pub classes: Vec<EdgeSet>,
    pub extended_at: Option<VertexId>,
    pub meta: PackingMeta,
}

impl Packing {
    pub fn new(classes: Vec<EdgeSet>) -> Self {
        Packing { k: classes.len(), classes, extended_at: None, meta: PackingMeta::default() }
    }

    pub fn is_disjoint(&self) -> bool {
        let mut seen = EdgeSet::new();
        self.classes.iter().flatten().all(|e| seen.insert(*e))
    }

    pub fn used_edges(&self) -> EdgeSet {
        self.classes.iter().flatten().copied().collect()
    }
}

/// Whether `p` extends `sp`: each part is inside its class and `sp.at` is not
/// a cut vertex of any class.
pub fn verify_extension(g: &MultiGraph, sp: &EdgeSubpartition, p: &Packing) -> bool {
    if p.k != sp.k || p.classes.len() != p.k {
        return false;
    }
    sp.parts().iter().zip(&p.classes).all(|(part, class)| {
        if !part.is_subset(class) {
            return false;
        }
        match g.edge_induced_subgraph(class) {
            Ok(h) => !h.has_vertex(sp.at) || !h.is_cut_vertex(sp.at).unwrap_or(true),
            Err(_) => false,
        }
    })
}

/// Constraints for verifying or searching a packing.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PackOptions {
    pub extend: Option<EdgeSubpartition>,
    pub balance: VertexSet,
    pub forbid_fake: bool,
    /// Search-node budget for [`exact_pack`]; ignored by the verifier.
    pub budget: u64,
}

impl PackOptions {
    pub fn with_budget(budget: u64) -> Self {
        PackOptions { budget, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingReport {
    pub class_count_ok: bool,
    pub ids_live: bool,
    pub disjoint: bool,
    pub groups_connected: bool,
    /// `(class, group)` pairs where the group is not connected.
    pub group_failures: Vec<(usize, usize)>,
    pub extension: Option<bool>,
    pub balance: Option<bool>,
    pub unbalanced: Vec<VertexId>,
    pub fake_free: Option<bool>,
}

impl PackingReport {
    pub fn passed(&self) -> bool {
        self.class_count_ok
            && self.ids_live
            && self.disjoint
            && self.groups_connected
            && self.extension.unwrap_or(true)
            && self.balance.unwrap_or(true)
            && self.fake_free.unwrap_or(true)
    }
}

/// Whether every group with two or more vertices is connected by `class`.
/// A singleton group is always satisfied.
pub fn class_connects(g: &MultiGraph, class: &EdgeSet, group: &VertexSet) -> bool {
    if group.len() <= 1 {
        return true;
    }
    match g.edge_induced_subgraph(class) {
        Ok(h) => h.connects(group),
        Err(_) => false,
    }
}

/// Checks a packing against the terminal groups and the optional extension,
/// balancing and fake-edge constraints.
pub fn verify_packing(g: &MultiGraph, ts: &TerminalSystem, p: &Packing, opts: &PackOptions) -> PackingReport {
    let class_count_ok = p.classes.len() == p.k;
    let ids_live = p.classes.iter().flatten().all(|&e| g.has_edge(e));
    let disjoint = p.is_disjoint();
    let mut group_failures = Vec::new();
    if ids_live {
        for (i, class) in p.classes.iter().enumerate() {
            let h = g.edge_induced_subgraph(class).expect("ids checked");
            for (j, grp) in ts.groups.iter().enumerate() {
                if grp.len() > 1 && !h.connects(grp) {
                    group_failures.push((i, j));
                }
            }
        }
    }
    let groups_connected = ids_live && group_failures.is_empty();
    let extension = opts.extend.as_ref().map(|sp| ids_live && verify_extension(g, sp, p));
    let mut unbalanced = Vec::new();
    let balance = if opts.balance.is_empty() {
        None
    } else {
        for &v in &opts.balance {
            let ok = EdgeSubpartition::induced(g, v, &p.classes)
                .map(|sp| is_balanced_subpartition(g, &sp))
                .unwrap_or(false);
            if !ok {
                unbalanced.push(v);
            }
        }
        Some(unbalanced.is_empty())
    };
    let fake_free = opts.forbid_fake.then(|| {
        p.classes
            .iter()
            .flatten()
            .all(|&e| g.edge(e).map(|x| x.kind == EdgeKind::Original).unwrap_or(false))
    });
    PackingReport {
        class_count_ok,
        ids_live,
        disjoint,
        groups_connected,
        group_failures,
        extension,
        balance,
        unbalanced,
        fake_free,
    }
}

/// Table of the threshold recurrence `f(3) = 0`, `f(t) = f(t-1) + 2t + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdTable {
    pub f: BTreeMap<u32, u64>,
}

impl ThresholdTable {
    pub fn up_to(t_max: u32) -> Self {
        let mut f = BTreeMap::new();
        let mut acc = 0u64;
        for t in 3..=t_max {
            if t > 3 {
                acc += 2 * t as u64 + 1;
            }
            f.insert(t, acc);
        }
        ThresholdTable { f }
    }
}

/// The additive slack `f(t)` used for `t` groups (defined for `t >= 3`).
pub fn threshold_f(t: u32) -> Result<u64> {
    if t < 3 {
        return Err(Error::Precondition(format!("threshold is defined for t >= 3, got {t}")));
    }
    // closed form of the recurrence: (t + 1)^2 - 16
    Ok((t as u64 + 1).pow(2) - 16)
}

/// Keeps the `k_out` smallest parts (ties by lower label), relabels them
/// `1..=k_out` preserving their relative order and turns every other
/// labeled edge into an unlabeled one.
pub fn keep_smallest_parts(sp: &EdgeSubpartition, k_out: usize) -> Result<EdgeSubpartition> {
    if k_out > sp.k {
        return Err(Error::Precondition(format!("cannot grow {} parts to {k_out}", sp.k)));
    }
    let parts = sp.parts();
    let mut order: Vec<usize> = (0..sp.k).collect();
    order.sort_by_key(|&i| (parts[i].len(), i));
    let mut kept: Vec<usize> = order.into_iter().take(k_out).collect();
    kept.sort_unstable();
    let mut relabel = vec![0usize; sp.k + 1];
    for (new, &old) in kept.iter().enumerate() {
        relabel[old + 1] = new + 1;
    }
    let label = sp.label.iter().map(|(&e, &l)| (e, relabel[l])).collect();
    Ok(EdgeSubpartition { at: sp.at, k: k_out, label })
}

/// Reduces a subpartition to `k_out` parts: keep the smallest parts, then
/// give every empty kept part one unlabeled edge (smallest id first).
pub fn normalize_subpartition(sp: &EdgeSubpartition, k_out: usize) -> Result<EdgeSubpartition> {
    let mut out = keep_smallest_parts(sp, k_out)?;
    let mut spare = out.unlabeled_edges().into_iter();
    for (i, size) in out.part_sizes().into_iter().enumerate() {
        if size == 0 {
            let e = spare
                .next()
                .ok_or_else(|| Error::Precondition("not enough unlabeled edges to fill empty parts".into()))?;
            out.label.insert(e, i + 1);
        }
    }
    Ok(out)
}

/// Sufficient S-connector test: `s` is connected in `h` and every other
/// vertex of `h` has degree exactly two.
pub fn verify_s_connector(h: &MultiGraph, s: &VertexSet) -> bool {
    if !h.connects(s) || (s.len() > 1 && !s.iter().all(|v| h.has_vertex(*v))) {
        return false;
    }
    h.vertices()
        .filter(|v| !s.contains(v))
        .all(|v| h.degree(v).map(|d| d == 2).unwrap_or(false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> (MultiGraph, Vec<VertexId>, Vec<EdgeId>) {
        let mut g = MultiGraph::new();
        let vs: Vec<_> = (0..n).map(|_| g.add_vertex()).collect();
        let es = edges.iter().map(|&(a, b)| g.add_edge(vs[a], vs[b]).unwrap()).collect();
        (g, vs, es)
    }

    fn star(d: usize) -> (MultiGraph, VertexId, Vec<EdgeId>) {
        let edges: Vec<_> = (1..=d).map(|i| (0, i)).collect();
        let (g, v, es) = graph(d + 1, &edges);
        (g, v[0], es)
    }

    #[test]
    fn balanced_examples() {
        let k = 3;
        let (g, v, es) = star(2 * k);
        let exact = EdgeSubpartition::from_labels(&g, v, k, es.iter().enumerate().map(|(i, &e)| (e, i / 2 + 1)))
            .unwrap();
        assert!(is_balanced_subpartition(&g, &exact));
        assert!(is_balanced_subpartition(&g, &EdgeSubpartition::unlabeled(&g, v, k).unwrap()));

        let (g, v, es) = star(3);
        let sp = EdgeSubpartition::from_labels(&g, v, 2, [(es[0], 1)]).unwrap();
        assert!(!is_balanced_subpartition(&g, &sp));
    }

    #[test]
    fn labels_validated() {
        let (g, v, es) = star(3);
        assert!(EdgeSubpartition::from_labels(&g, v, 2, [(es[0], 3)]).is_err());
        let other = graph(2, &[(0, 1)]).2[0];
        let mut sp = EdgeSubpartition::unlabeled(&g, v, 2).unwrap();
        sp.label.insert(other, 1);
        assert!(!is_balanced_subpartition(&g, &sp));
    }

    #[test]
    fn extension_examples() {
        // v=0 on a 4-cycle 0-1-2-3; P_1 = both cycle edges at v
        let (g, v, es) = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let sp = EdgeSubpartition::from_labels(&g, v[0], 1, [(es[0], 1), (es[3], 1)]).unwrap();
        let cycle = Packing::new(vec![es.iter().copied().collect()]);
        assert!(verify_extension(&g, &sp, &cycle));

        let (g, c, es) = star(3);
        let sp = EdgeSubpartition::from_labels(&g, c, 1, [(es[0], 1), (es[1], 1)]).unwrap();
        let star_class = Packing::new(vec![es.iter().copied().collect()]);
        assert!(!verify_extension(&g, &sp, &star_class));
        let missing = Packing::new(vec![[es[0]].into()]);
        assert!(!verify_extension(&g, &sp, &missing));
    }

    #[test]
    fn packing_report() {
        let (g, v, es) = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let ts = TerminalSystem::single(v.iter().copied().collect());
        let tree = Packing::new(vec![[es[0], es[1]].into()]);
        let r = verify_packing(&g, &ts, &tree, &PackOptions::default());
        assert!(r.passed(), "{r:?}");

        let shared = Packing::new(vec![[es[0], es[1]].into(), [es[1], es[2]].into()]);
        let r = verify_packing(&g, &ts, &shared, &PackOptions::default());
        assert!(!r.disjoint && !r.passed());

        let empty = Packing::new(vec![EdgeSet::new()]);
        assert!(!verify_packing(&g, &ts, &empty, &PackOptions::default()).passed());
        let single = TerminalSystem::single([v[0]].into());
        assert!(verify_packing(&g, &single, &empty, &PackOptions::default()).passed());
    }

    #[test]
    fn fake_edges_refused_on_request() {
        let (mut g, v, _) = graph(2, &[]);
        let f = g.add_edge_with_kind(v[0], v[1], EdgeKind::Fake).unwrap();
        let ts = TerminalSystem::single(v.iter().copied().collect());
        let p = Packing::new(vec![[f].into()]);
        assert!(verify_packing(&g, &ts, &p, &PackOptions::default()).passed());
        let strict = PackOptions { forbid_fake: true, ..Default::default() };
        assert_eq!(verify_packing(&g, &ts, &p, &strict).fake_free, Some(false));
    }

    #[test]
    fn threshold_values() {
        assert_eq!(threshold_f(3).unwrap(), 0);
        assert_eq!(threshold_f(4).unwrap(), 9);
        assert_eq!(threshold_f(5).unwrap(), 20);
        assert_eq!(threshold_f(6).unwrap(), 33);
        assert!(threshold_f(2).is_err());
        let table = ThresholdTable::up_to(50);
        for t in 3..=50 {
            assert_eq!(table.f[&t], threshold_f(t).unwrap());
        }
    }

    #[test]
    fn normalize_examples() {
        let (g, v, es) = star(8);
        // sizes (3,1,2), two spare edges
        let labels = [(es[0], 1), (es[1], 1), (es[2], 1), (es[3], 2), (es[4], 3), (es[5], 3)];
        let sp = EdgeSubpartition::from_labels(&g, v, 3, labels).unwrap();
        let out = normalize_subpartition(&sp, 2).unwrap();
        assert_eq!(out.part_sizes(), vec![1, 2]);
        assert_eq!(out.unlabeled_edges().len(), 5);
        assert_eq!(out.part(1), [es[3]].into());

        // k_in = k_out: only empty parts are filled, smallest unlabeled id first
        let sp = EdgeSubpartition::from_labels(&g, v, 3, [(es[2], 2)]).unwrap();
        let out = normalize_subpartition(&sp, 3).unwrap();
        assert_eq!(out.part(1), [es[0]].into());
        assert_eq!(out.part(2), [es[2]].into());
        assert_eq!(out.part(3), [es[1]].into());

        let (g, v, es) = star(2);
        let sp = EdgeSubpartition::from_labels(&g, v, 3, [(es[0], 1), (es[1], 2)]).unwrap();
        assert!(normalize_subpartition(&sp, 3).is_err());
        assert!(normalize_subpartition(&sp, 4).is_err());
    }

    #[test]
    fn s_connector_examples() {
        let (g, v, _) = graph(4, &[(0, 2), (2, 3), (3, 1)]);
        assert!(verify_s_connector(&g, &[v[0], v[1]].into()));
        let (g, v, _) = graph(5, &[(0, 3), (1, 3), (2, 3), (3, 4), (4, 0)]);
        assert!(!verify_s_connector(&g, &[v[0], v[1], v[2]].into()));
        let (g, v, _) = graph(3, &[(0, 1), (1, 2)]);
        assert!(verify_s_connector(&g, &v.iter().copied().collect()));
    }
}
