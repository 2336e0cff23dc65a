//! Recursive cut-contract-extend-merge driver for Steiner forest packing.
//!
//! When the terminals are jointly well connected the groups are merged and a
//! base solver packs `k` Steiner trees. Otherwise a minimum cut that keeps
//! every group whole is taken; the side holding more groups is packed
//! recursively with the other side contracted, the labels it induces on the
//! cut are copied to the contracted vertex of the small side, that vertex is
//! padded with fake edges, and the small side is packed so that it extends
//! those labels. The two halves are then merged edge set by edge set.

use serde::{Deserialize, Serialize};

use super::{exact_pack, pack_spanning_trees, verify_packing, EdgeSubpartition, ExactOutcome, PackOptions, Packing};
use crate::connectivity::{min_terminal_separating_cut, steiner_connectivity};
use crate::error::Result;
use crate::graph::{EdgeId, EdgeSet, MultiGraph, TerminalSystem, VertexSet};
use crate::transforms::{add_fake_edges, edge_union, strip_fake};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseSolver {
    Exact,
    Spanning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposeConfig {
    /// Degree the contracted vertex is padded to is `q * k`.
    pub q: usize,
    /// Joint terminal connectivity at which groups are merged; `None` means `7k`.
    pub joint_threshold: Option<u64>,
    pub base: BaseSolver,
    /// Node budget for each exact search (0 = unlimited).
    pub budget: u64,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        DecomposeConfig { q: 36, joint_threshold: None, base: BaseSolver::Exact, budget: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum TraceStep {
    /// A group is less connected than `q * k`.
    WeakGroup { depth: usize, group: usize, connectivity: u64, wanted: u64 },
    /// Groups merged and handed to the base solver.
    Base { depth: usize, solver: BaseSolver, groups: usize, vertices: usize, edges: usize, verdict: String },
    Split { depth: usize, cut_size: u64, small_groups: usize, big_groups: usize, small_vertices: usize },
    Extend { depth: usize, degree: usize, fake_edges: usize, labeled: usize, verdict: String, nodes: u64 },
    Merge { depth: usize, passed: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DecomposeOutcome {
    Packed { packing: Packing, trace: Vec<TraceStep> },
    Fail { reason: String, trace: Vec<TraceStep> },
}

impl DecomposeOutcome {
    pub fn packing(&self) -> Option<&Packing> {
        match self {
            DecomposeOutcome::Packed { packing, .. } => Some(packing),
            DecomposeOutcome::Fail { .. } => None,
        }
    }

    pub fn trace(&self) -> &[TraceStep] {
        match self {
            DecomposeOutcome::Packed { trace, .. } | DecomposeOutcome::Fail { trace, .. } => trace,
        }
    }
}

struct Driver<'c> {
    k: usize,
    cfg: &'c DecomposeConfig,
    trace: Vec<TraceStep>,
}

type Step = std::result::Result<Vec<EdgeSet>, String>;

/// Packs `k` edge-disjoint forests connecting every group of `ts`.
pub fn decompose_and_pack(
    g: &MultiGraph,
    ts: &TerminalSystem,
    k: usize,
    cfg: &DecomposeConfig,
) -> Result<DecomposeOutcome> {
    ts.validate(g)?;
    let mut d = Driver { k, cfg, trace: Vec::new() };
    let wanted = (cfg.q * k) as u64;
    for (i, grp) in ts.groups.iter().enumerate() {
        if grp.len() > 1 {
            let (c, _) = steiner_connectivity(g, grp)?;
            if c < wanted {
                d.trace.push(TraceStep::WeakGroup { depth: 0, group: i, connectivity: c, wanted });
            }
        }
    }
    let groups: Vec<VertexSet> = ts.groups.iter().filter(|grp| grp.len() > 1).cloned().collect();
    let step = d.solve(g, &groups, &ts.reserve, 0)?;
    let outcome = match step {
        Err(reason) => DecomposeOutcome::Fail { reason, trace: d.trace },
        Ok(classes) => {
            let p = Packing::new(classes);
            let report = verify_packing(g, ts, &p, &PackOptions::default());
            if report.passed() {
                DecomposeOutcome::Packed { packing: p, trace: d.trace }
            } else {
                DecomposeOutcome::Fail { reason: format!("merged packing rejected: {report:?}"), trace: d.trace }
            }
        }
    };
    Ok(outcome)
}

impl Driver<'_> {
    fn joint_threshold(&self) -> u64 {
        self.cfg.joint_threshold.unwrap_or(7 * self.k as u64)
    }

    fn solve(&mut self, g: &MultiGraph, groups: &[VertexSet], reserve: &VertexSet, depth: usize) -> Result<Step> {
        if groups.is_empty() {
            return Ok(Ok(vec![EdgeSet::new(); self.k]));
        }
        let all: VertexSet = groups.iter().flatten().copied().collect();
        if groups.len() == 1 || steiner_connectivity(g, &all)?.0 >= self.joint_threshold() {
            return self.base(g, groups.len(), all, reserve, depth);
        }

        let ts = TerminalSystem::new(groups.to_vec(), VertexSet::new());
        let (cut_size, cut, split) = min_terminal_separating_cut(g, &ts)?;
        let (small_ids, big_ids, small_side) = if split.side_a.len() < split.side_b.len() {
            (split.side_a, split.side_b, cut.side_a)
        } else {
            (split.side_b, split.side_a, cut.side_b)
        };
        let big_side: VertexSet = g.vertices().filter(|v| !small_side.contains(v)).collect();
        self.trace.push(TraceStep::Split {
            depth,
            cut_size,
            small_groups: small_ids.len(),
            big_groups: big_ids.len(),
            small_vertices: small_side.len(),
        });

        // big side, with the small side contracted to `v`
        let (g_big, v, _) = g.contract(&small_side)?;
        let big_groups: Vec<VertexSet> = big_ids.iter().map(|&j| groups[j].clone()).collect();
        let mut big_reserve: VertexSet = reserve.intersection(&big_side).copied().collect();
        if g_big.incident_edge_count(v)? >= self.cfg.q.saturating_sub(2) * self.k {
            big_reserve.insert(v);
        }
        let outer = match self.solve(&g_big, &big_groups, &big_reserve, depth + 1)? {
            Ok(c) => c,
            Err(e) => return Ok(Err(e)),
        };

        // small side, with the big side contracted to `v2`
        let (g_small, v2, boundary) = g.contract(&big_side)?;
        let mut labels: Vec<(EdgeId, usize)> = Vec::new();
        for &e in &boundary {
            if let Some(i) = outer.iter().position(|c| c.contains(&e)) {
                labels.push((e, i + 1));
            }
        }
        let small_terms: VertexSet = small_ids.iter().flat_map(|&j| groups[j].iter().copied()).collect();
        let anchor = *small_terms.first().expect("groups are non-empty");
        let degree = boundary.len();
        let target = (self.cfg.q * self.k).max(degree);
        let (g_pad, fakes) = add_fake_edges(&g_small, v2, target, anchor)?;
        let mut spare = fakes.edge_ids.iter().copied();
        for i in 1..=self.k {
            if !labels.iter().any(|&(_, l)| l == i) {
                if let Some(f) = spare.next() {
                    labels.push((f, i));
                }
            }
        }
        let labeled = labels.len();
        let sp = EdgeSubpartition::from_labels(&g_pad, v2, self.k, labels)?;
        let mut group = small_terms.clone();
        group.insert(v2);
        let opts = PackOptions {
            extend: Some(sp),
            balance: reserve.intersection(&small_side).copied().collect(),
            forbid_fake: false,
            budget: self.cfg.budget,
        };
        let (res, stats) = exact_pack(&g_pad, &TerminalSystem::single(group), self.k, &opts)?;
        self.trace.push(TraceStep::Extend {
            depth,
            degree,
            fake_edges: fakes.edge_ids.len(),
            labeled,
            verdict: res.verdict().to_string(),
            nodes: stats.nodes,
        });
        let inner = match res {
            ExactOutcome::Feasible(p) => p.classes,
            other => return Ok(Err(format!("extension step at depth {depth}: {}", other.verdict()))),
        };

        let mut merged = Vec::with_capacity(self.k);
        for (h, h_outer) in inner.iter().zip(&outer) {
            let h = strip_fake(h, &g_pad);
            let union = edge_union(g, &h, h_outer)?;
            merged.push(union.edge_ids().collect::<EdgeSet>());
        }
        let local = TerminalSystem::new(groups.to_vec(), VertexSet::new());
        let passed = verify_packing(g, &local, &Packing::new(merged.clone()), &PackOptions::default()).passed();
        self.trace.push(TraceStep::Merge { depth, passed });
        if !passed {
            return Ok(Err(format!("merge at depth {depth} does not connect every group")));
        }
        Ok(Ok(merged))
    }

    fn base(&mut self, g: &MultiGraph, groups: usize, terms: VertexSet, reserve: &VertexSet, depth: usize) -> Result<Step> {
        let k = self.k;
        let record = |d: &mut Self, verdict: &str| {
            d.trace.push(TraceStep::Base {
                depth,
                solver: d.cfg.base,
                groups,
                vertices: g.vertex_count(),
                edges: g.edge_count(),
                verdict: verdict.to_string(),
            })
        };
        match self.cfg.base {
            BaseSolver::Spanning => {
                // spanning trees of the component holding the terminals
                let comp = g.reachable_from(*terms.first().expect("non-empty"));
                if !terms.is_subset(&comp) {
                    record(self, "INFEASIBLE");
                    return Ok(Err(format!("terminals disconnected at depth {depth}")));
                }
                let outside: VertexSet = g.vertices().filter(|v| !comp.contains(v)).collect();
                let h = g.without_vertices(&outside);
                let out = pack_spanning_trees(&h, k)?;
                match out.packing() {
                    Some(p) => {
                        record(self, "FEASIBLE");
                        Ok(Ok(p.classes.clone()))
                    }
                    None => {
                        record(self, "INFEASIBLE");
                        Ok(Err(format!("spanning base at depth {depth}: INFEASIBLE")))
                    }
                }
            }
            BaseSolver::Exact => {
                let opts = PackOptions {
                    balance: reserve.clone(),
                    budget: self.cfg.budget,
                    ..Default::default()
                };
                let (res, _) = exact_pack(g, &TerminalSystem::single(terms), k, &opts)?;
                record(self, res.verdict());
                match res {
                    ExactOutcome::Feasible(p) => Ok(Ok(p.classes)),
                    other => Ok(Err(format!("exact base at depth {depth}: {}", other.verdict()))),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexId;

    fn graph(n: usize, edges: &[(usize, usize)]) -> (MultiGraph, Vec<VertexId>) {
        let mut g = MultiGraph::new();
        let vs: Vec<_> = (0..n).map(|_| g.add_vertex()).collect();
        for &(a, b) in edges {
            g.add_edge(vs[a], vs[b]).unwrap();
        }
        (g, vs)
    }

    #[test]
    fn single_group_spanning_base() {
        let (g, vs) = graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let ts = TerminalSystem::single(vs.iter().copied().collect());
        let cfg = DecomposeConfig { base: BaseSolver::Spanning, ..Default::default() };
        let out = decompose_and_pack(&g, &ts, 2, &cfg).unwrap();
        let p = out.packing().expect("packed");
        assert!(p.classes.iter().all(|c| c.len() == 3));
        assert!(matches!(out.trace().last(), Some(TraceStep::Base { .. })));
    }

    #[test]
    fn two_groups_across_small_cut() {
        // two triangles joined by three edges; one group per triangle
        let (g, vs) = graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]);
        let ts = TerminalSystem::new(vec![[vs[0], vs[1]].into(), [vs[4], vs[5]].into()], VertexSet::new());
        let cfg = DecomposeConfig { q: 9, ..Default::default() };
        let out = decompose_and_pack(&g, &ts, 1, &cfg).unwrap();
        let p = out.packing().expect("packed");
        assert!(verify_packing(&g, &ts, p, &PackOptions::default()).passed());
        let steps = out.trace();
        assert!(steps.iter().any(|s| matches!(s, TraceStep::Split { cut_size: 3, .. })));
        assert!(steps.iter().any(|s| matches!(s, TraceStep::Merge { passed: true, .. })));
        assert_eq!(exact_pack(&g, &ts, 1, &PackOptions::default()).unwrap().0.verdict(), "FEASIBLE");
    }

    #[test]
    fn infeasible_reports_failure() {
        let (g, vs) = graph(4, &[(0, 1), (2, 3), (1, 2)]);
        let ts = TerminalSystem::new(vec![[vs[0], vs[1]].into(), [vs[2], vs[3]].into()], VertexSet::new());
        let out = decompose_and_pack(&g, &ts, 2, &DecomposeConfig::default()).unwrap();
        assert!(out.packing().is_none());
        assert!(out.trace().iter().any(|s| matches!(s, TraceStep::WeakGroup { .. })));
    }
}
