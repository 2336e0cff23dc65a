//! Generator and checks for the two-clique extension counterexample.
//!
//! Two cliques `A`, `B` on `Qk + 1` vertices form `S`. Of the
//! `Qk - floor((k-1)/2)` edges between them, `Qk - k + 1` (the set `X`) are
//! subdivided; the rest form `Y`. A vertex `v` is joined to every
//! subdivision vertex, `floor((k-1)/2)` times into `A` and `ceil((k-1)/2)`
//! times into `B`. Subdivision vertices get subdivided loops to reach `Qk`
//! incident edges and form `R`. Label 1 goes on the `v`-`R` edges and labels
//! `2..=k` on the remaining edges at `v`, one each. Every class other than 1
//! then needs its own `Y` edge, and `|Y| < k - 1`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connectivity::{steiner_connectivity, FlowOracle};
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, MultiGraph, TerminalSystem, VertexId, VertexSet};
use crate::packing::{exact_pack, EdgeSubpartition, ExactOutcome, PackOptions, SearchStats};

/// Smallest `Q` the original statement is made for.
pub const STATED_MIN_Q: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleParams {
    pub q: usize,
    pub k: usize,
    pub seed: u64,
    /// Additional `Y` edges beyond the construction (0 for the real instance).
    pub extra_y: usize,
}

impl CounterexampleParams {
    pub fn new(q: usize, k: usize, seed: u64) -> Self {
        CounterexampleParams { q, k, seed, extra_y: 0 }
    }

    /// The same parameters with `Y` grown to `k - 1` edges.
    pub fn control(self) -> Self {
        let y = self.k - (self.k - 1) / 2 - 1;
        CounterexampleParams { extra_y: self.k - 1 - y, ..self }
    }
}

#[derive(Clone, Debug)]
pub struct CounterexampleInstance {
    pub graph: MultiGraph,
    pub s: VertexSet,
    pub r: VertexSet,
    pub v: VertexId,
    pub sp: EdgeSubpartition,
    pub params: CounterexampleParams,
    pub a: VertexSet,
    pub b: VertexSet,
    /// Subdivision vertices of the `X` edges (equal to `r`).
    pub x_sub: VertexSet,
    pub y: EdgeSet,
    /// True when `q` is below the range the original statement covers.
    pub below_stated_range: bool,
}

impl CounterexampleInstance {
    pub fn qk(&self) -> usize {
        self.params.q * self.params.k
    }

    pub fn terminal_system(&self) -> TerminalSystem {
        TerminalSystem::new(vec![self.s.clone()], self.r.clone())
    }

    /// Violated structural invariants, empty when the instance conforms.
    pub fn structural_violations(&self) -> Vec<String> {
        let (q, k) = (self.params.q, self.params.k);
        let qk = q * k;
        let g = &self.graph;
        let mut out = Vec::new();
        let mut check = |ok: bool, what: &str| {
            if !ok {
                out.push(what.to_string());
            }
        };
        check(self.a.len() == qk + 1 && self.b.len() == qk + 1, "clique sizes");
        for side in [&self.a, &self.b] {
            let vs: Vec<_> = side.iter().copied().collect();
            let complete = vs.iter().enumerate().all(|(i, &x)| {
                vs[i + 1..].iter().all(|&y| g.incident(x).unwrap().iter().any(|e| g.edge(*e).unwrap().other(x) == y))
            });
            check(complete, "cliques complete");
        }
        check(self.x_sub.len() == qk - k + 1, "|X| = Qk - k + 1");
        let y_expected = k - (k - 1) / 2 - 1 + self.params.extra_y;
        check(self.y.len() == y_expected, "|Y| = k - floor((k-1)/2) - 1");
        check(g.degree(self.v).ok() == Some(qk), "degree(v) = Qk");
        check(
            self.r.iter().all(|&r| g.incident_edge_count(r).unwrap_or(0) >= qk),
            "R incidence >= Qk",
        );
        check(self.s.is_disjoint(&self.r), "S and R disjoint");
        check(!g.has_loops(), "loopless");
        let labels = self.sp.part_sizes();
        check(labels.first() == Some(&self.x_sub.len()), "label 1 on every X edge");
        check(labels.iter().skip(1).all(|&c| c == 1), "labels 2..k once each");
        check(self.sp.unlabeled_edges().is_empty(), "every edge at v labeled");
        out
    }
}

/// Builds the instance; random choices come from `params.seed`.
pub fn build_lau_counterexample(params: CounterexampleParams) -> Result<CounterexampleInstance> {
    let CounterexampleParams { q, k, seed, extra_y } = params;
    if k < 3 {
        return Err(Error::Precondition(format!("the construction needs k >= 3, got {k}")));
    }
    if q < 4 {
        return Err(Error::Precondition(format!("the construction needs Q >= 4, got {q}")));
    }
    let qk = q * k;
    let half_lo = (k - 1) / 2;
    let half_hi = k - 1 - half_lo;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = MultiGraph::new();
    let a: Vec<VertexId> = (0..=qk).map(|_| g.add_vertex()).collect();
    let b: Vec<VertexId> = (0..=qk).map(|_| g.add_vertex()).collect();
    for side in [&a, &b] {
        for i in 0..side.len() {
            for j in i + 1..side.len() {
                g.add_edge(side[i], side[j])?;
            }
        }
    }
    let cross_n = qk - half_lo + extra_y;
    let mut cross = Vec::with_capacity(cross_n);
    for _ in 0..cross_n {
        let x = a[rng.gen_range(0..a.len())];
        let y = b[rng.gen_range(0..b.len())];
        cross.push(g.add_edge(x, y)?);
    }
    cross.shuffle(&mut rng);
    let x_n = qk - k + 1;
    let y: EdgeSet = cross[x_n..].iter().copied().collect();
    let mut x_edges = cross[..x_n].to_vec();
    x_edges.sort();

    let v = g.add_vertex();
    let mut x_sub = VertexSet::new();
    let mut labels = Vec::new();
    for &e in &x_edges {
        let (m, _, _) = g.subdivide(e)?;
        x_sub.insert(m);
        labels.push((g.add_edge(v, m)?, 1));
    }
    for i in 0..half_lo {
        let t = a[rng.gen_range(0..a.len())];
        labels.push((g.add_edge(v, t)?, 2 + i));
    }
    for i in 0..half_hi {
        let t = b[rng.gen_range(0..b.len())];
        labels.push((g.add_edge(v, t)?, 2 + half_lo + i));
    }
    // each loop is subdivided: two parallel edges to a fresh vertex
    let loops = (qk - 3).div_ceil(2);
    for &r in &x_sub {
        for _ in 0..loops {
            let m = g.add_vertex();
            g.add_edge(r, m)?;
            g.add_edge(r, m)?;
        }
    }
    let sp = EdgeSubpartition::from_labels(&g, v, k, labels)?;
    let s: VertexSet = a.iter().chain(&b).copied().collect();
    Ok(CounterexampleInstance {
        graph: g,
        s,
        r: x_sub.clone(),
        v,
        sp,
        params,
        a: a.into_iter().collect(),
        b: b.into_iter().collect(),
        x_sub,
        y,
        below_stated_range: q < STATED_MIN_Q,
    })
}

/// `N(v)` inside `S` or `R`, `d(v) <= Qk`, and `v` in neither set.
pub fn check_neighborhood_condition(inst: &CounterexampleInstance) -> bool {
    let g = &inst.graph;
    let Ok(nbrs) = g.neighbors(inst.v) else { return false };
    nbrs.iter().all(|w| inst.s.contains(w) || inst.r.contains(w))
        && g.degree(inst.v).map(|d| d <= inst.qk()).unwrap_or(false)
        && !inst.s.contains(&inst.v)
        && !inst.r.contains(&inst.v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition2Report {
    pub holds: bool,
    pub checked: usize,
    /// Smallest cut separating `{v, r}` from `S` over all `r`.
    pub min_cut: Option<u64>,
    pub r_incidence_ok: bool,
}

/// No cut of at most `Qk` edges puts `v` and part of `R` opposite all of `S`.
///
/// Such a cut exists exactly when some `r` has a `{v, r}` versus `S` cut of
/// at most `Qk`, so one flow per `r` decides it.
pub fn check_condition2(inst: &CounterexampleInstance) -> Result<Condition2Report> {
    let g = &inst.graph;
    let qk = inst.qk() as u64;
    let rs: Vec<VertexId> = inst.r.iter().copied().collect();
    let cuts: Vec<u64> = rs
        .par_iter()
        .map_init(
            || FlowOracle::new(g),
            |oracle, &r| oracle.min_cut(&[inst.v, r].into(), &inst.s).map(|(c, _)| c),
        )
        .collect::<Result<_>>()?;
    let min_cut = cuts.iter().copied().min();
    Ok(Condition2Report {
        holds: cuts.iter().all(|&c| c > qk),
        checked: cuts.len(),
        min_cut,
        r_incidence_ok: inst.r.iter().all(|&r| g.incident_edge_count(r).unwrap_or(0) >= inst.qk()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Bottleneck {
    Impossible,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BottleneckReport {
    pub x_size: usize,
    pub y_size: usize,
    /// Classes that each need their own `Y` edge.
    pub classes_needing_y: usize,
    pub degree_v: usize,
    pub s_connectivity: u64,
    pub s_connected_enough: bool,
    pub verdict: Bottleneck,
}

/// The counting argument in report form, plus a flow audit of `S`.
pub fn bottleneck_certificate(inst: &CounterexampleInstance) -> Result<BottleneckReport> {
    let (s_connectivity, _) = steiner_connectivity(&inst.graph, &inst.s)?;
    let classes_needing_y = inst.params.k - 1;
    let y_size = inst.y.len();
    Ok(BottleneckReport {
        x_size: inst.x_sub.len(),
        y_size,
        classes_needing_y,
        degree_v: inst.graph.degree(inst.v)?,
        s_connectivity,
        s_connected_enough: s_connectivity >= inst.qk() as u64,
        verdict: if y_size < classes_needing_y { Bottleneck::Impossible } else { Bottleneck::Inconclusive },
    })
}

/// Exhaustive search for `k` classes connecting `S` that extend the labels
/// at `v`. A packing on an instance the counting argument rules out means
/// the generator or the argument is broken, and panics.
pub fn exhaustive_refute(inst: &CounterexampleInstance, budget: u64) -> Result<(ExactOutcome, SearchStats)> {
    let opts = PackOptions { extend: Some(inst.sp.clone()), budget, ..Default::default() };
    let ts = TerminalSystem::single(inst.s.clone());
    let (out, stats) = exact_pack(&inst.graph, &ts, inst.params.k, &opts)?;
    if let ExactOutcome::Feasible(p) = &out {
        assert!(
            inst.y.len() >= inst.params.k - 1,
            "found an extension on an instance with |Y| < k - 1: {:?}",
            p.classes
        );
    }
    Ok((out, stats))
}
