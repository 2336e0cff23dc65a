//! The (k,g)-family feasibility functional and its exhaustive audit.
//!
//! For a partition `P = A_1..A_l` of part of the vertex set, covering `S`
//! with every block meeting `S`, and `B` the uncovered vertices,
//!
//! ```text
//! f_g(P) = sum_i d(A_i) - 2k(l - 1) - g(B) - 2 g(T)
//! ```
//!
//! where `d(A)` counts edges with exactly one end in `A` and `T` holds the
//! `S`-vertices that are alone (among `S`) in their block.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::connectivity::steiner_connectivity;
use crate::error::{Error, Result};
use crate::graph::{EdgeSet, MultiGraph, VertexId, VertexSet};

/// Largest vertex count [`audit_kg`] accepts by default.
pub const DEFAULT_AUDIT_BOUND: usize = 12;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityFunction {
    pub g: BTreeMap<VertexId, u64>,
}

impl ParityFunction {
    pub fn value(&self, v: VertexId) -> u64 {
        self.g.get(&v).copied().unwrap_or(0)
    }

    pub fn sum<'a>(&self, vs: impl IntoIterator<Item = &'a VertexId>) -> u64 {
        vs.into_iter().map(|&v| self.value(v)).sum()
    }

    /// Whether `g(v)` has the parity of `deg(v)` for every `v` outside `s`.
    pub fn is_parity_for(&self, graph: &MultiGraph, s: &VertexSet) -> bool {
        graph
            .vertices()
            .filter(|v| !s.contains(v))
            .all(|v| self.value(v) % 2 == (graph.degree(v).unwrap_or(0) % 2) as u64)
    }
}

/// `g(v) = 1` for vertices outside `s` of odd degree, 0 everywhere else.
pub fn make_parity_g(graph: &MultiGraph, s: &VertexSet) -> ParityFunction {
    let g = graph
        .vertices()
        .map(|v| {
            let odd = !s.contains(&v) && graph.degree(v).unwrap_or(0) % 2 == 1;
            (v, odd as u64)
        })
        .collect();
    ParityFunction { g }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissiblePartition {
    pub blocks: Vec<VertexSet>,
    pub outside: VertexSet,
}

impl AdmissiblePartition {
    /// Builds a partition from its blocks; everything else is outside.
    pub fn from_blocks(graph: &MultiGraph, blocks: Vec<VertexSet>) -> Self {
        let covered: VertexSet = blocks.iter().flatten().copied().collect();
        let outside = graph.vertices().filter(|v| !covered.contains(v)).collect();
        AdmissiblePartition { blocks, outside }
    }

    /// Blocks sorted by their smallest member.
    pub fn normalized(&self) -> Self {
        let mut blocks = self.blocks.clone();
        blocks.sort_by_key(|b| b.first().copied());
        AdmissiblePartition { blocks, outside: self.outside.clone() }
    }

    pub fn validate(&self, graph: &MultiGraph, s: &VertexSet) -> Result<()> {
        let mut seen = VertexSet::new();
        for b in &self.blocks {
            if b.is_disjoint(s) {
                return Err(Error::Invalid("a block contains no vertex of S".into()));
            }
            for &v in b {
                graph.check_vertex(v)?;
                if !seen.insert(v) {
                    return Err(Error::Invalid(format!("vertex {v} lies in two blocks")));
                }
            }
        }
        if !s.is_subset(&seen) {
            return Err(Error::Invalid("blocks do not cover S".into()));
        }
        let rest: VertexSet = graph.vertices().filter(|v| !seen.contains(v)).collect();
        if rest != self.outside {
            return Err(Error::Invalid("outside set is not the complement of the blocks".into()));
        }
        Ok(())
    }
}

/// Evaluates the functional on an admissible partition.
pub fn f_g(graph: &MultiGraph, s: &VertexSet, pf: &ParityFunction, p: &AdmissiblePartition, k: usize) -> Result<i64> {
    p.validate(graph, s)?;
    let block_sum: i64 = p.blocks.iter().map(|b| graph.boundary(b).len() as i64).sum();
    let lonely: Vec<VertexId> = p
        .blocks
        .iter()
        .filter_map(|b| {
            let mut in_s = b.intersection(s);
            match (in_s.next(), in_s.next()) {
                (Some(&v), None) => Some(v),
                _ => None,
            }
        })
        .collect();
    Ok(block_sum - 2 * k as i64 * (p.blocks.len() as i64 - 1)
        - pf.sum(&p.outside) as i64
        - 2 * pf.sum(&lonely) as i64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KgAudit {
    pub min_value: i64,
    pub argmin: AdmissiblePartition,
    /// Number of admissible partitions enumerated.
    pub partitions: u64,
}

/// Minimises `f_g` over all admissible partitions.
///
/// Vertices are assigned in id order to "outside" or to a block, with
/// blocks numbered in order of first use, so each partition is produced
/// once. Among equal minima the first in that order is kept.
pub fn audit_kg(graph: &MultiGraph, s: &VertexSet, pf: &ParityFunction, k: usize, bound: usize) -> Result<KgAudit> {
    let n = graph.vertex_count();
    if n > bound {
        return Err(Error::TooLarge { size: n, bound });
    }
    if s.is_empty() {
        return Err(Error::TooFewTerminals { needed: 1, got: 0 });
    }
    for &v in s {
        graph.check_vertex(v)?;
    }
    let verts: Vec<VertexId> = graph.vertices().collect();
    let index: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let ends: Vec<(usize, usize)> = graph
        .edges()
        .filter(|(_, e)| !e.is_loop())
        .map(|(_, e)| (index[&e.u], index[&e.v]))
        .collect();
    let in_s: Vec<bool> = verts.iter().map(|v| s.contains(v)).collect();
    let gv: Vec<i64> = verts.iter().map(|&v| pf.value(v) as i64).collect();
    // S-vertices not yet assigned, from position i onwards
    let mut s_after = vec![0usize; n + 1];
    for i in (0..n).rev() {
        s_after[i] = s_after[i + 1] + in_s[i] as usize;
    }

    let mut e = Enumerator {
        k: k as i64,
        ends,
        in_s,
        gv,
        s_after,
        assign: vec![0; n],
        s_count: Vec::new(),
        best: None,
        count: 0,
    };
    e.walk(0);
    let (min_value, assign) = e.best.expect("S is non-empty, so some partition exists");
    let blocks_n = assign.iter().copied().max().unwrap_or(0);
    let mut blocks = vec![VertexSet::new(); blocks_n];
    let mut outside = VertexSet::new();
    for (i, &a) in assign.iter().enumerate() {
        if a == 0 {
            outside.insert(verts[i]);
        } else {
            blocks[a - 1].insert(verts[i]);
        }
    }
    Ok(KgAudit { min_value, argmin: AdmissiblePartition { blocks, outside }, partitions: e.count })
}

struct Enumerator {
    k: i64,
    ends: Vec<(usize, usize)>,
    in_s: Vec<bool>,
    gv: Vec<i64>,
    s_after: Vec<usize>,
    // 0 = outside, b >= 1 = block b
    assign: Vec<usize>,
    // S-vertices per block
    s_count: Vec<usize>,
    best: Option<(i64, Vec<usize>)>,
    count: u64,
}

impl Enumerator {
    fn walk(&mut self, i: usize) {
        let missing = self.s_count.iter().filter(|&&c| c == 0).count();
        if missing > self.s_after[i] {
            return;
        }
        if i == self.assign.len() {
            self.count += 1;
            let f = self.value();
            if self.best.as_ref().is_none_or(|(b, _)| f < *b) {
                self.best = Some((f, self.assign.clone()));
            }
            return;
        }
        let blocks = self.s_count.len();
        if !self.in_s[i] {
            self.assign[i] = 0;
            self.walk(i + 1);
        }
        for b in 1..=blocks + 1 {
            if b > blocks {
                self.s_count.push(0);
            }
            self.assign[i] = b;
            self.s_count[b - 1] += self.in_s[i] as usize;
            self.walk(i + 1);
            self.s_count[b - 1] -= self.in_s[i] as usize;
            if b > blocks {
                self.s_count.pop();
            }
        }
    }

    fn value(&self) -> i64 {
        let mut delta = 0i64;
        for &(u, v) in &self.ends {
            let (a, b) = (self.assign[u], self.assign[v]);
            if a != b {
                delta += (a != 0) as i64 + (b != 0) as i64;
            }
        }
        let l = self.s_count.len() as i64;
        let mut outside = 0;
        let mut lonely = 0;
        for (i, &a) in self.assign.iter().enumerate() {
            if a == 0 {
                outside += self.gv[i];
            } else if self.in_s[i] && self.s_count[a - 1] == 1 {
                lonely += self.gv[i];
            }
        }
        delta - 2 * self.k * (l - 1) - outside - 2 * lonely
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreePackingReport {
    pub s_connected: bool,
    pub nonterminals_degree3: bool,
    pub nonterminals_independent: bool,
    pub deleted_ok: bool,
}

impl TreePackingReport {
    pub fn passed(&self) -> bool {
        self.s_connected && self.nonterminals_degree3 && self.nonterminals_independent && self.deleted_ok
    }
}

/// Checks: `s` is `3k`-edge-connected, every other vertex has degree 3 and
/// no two of them are adjacent, and `t` is at most `k` live edges.
pub fn check_treepacking_hypotheses(graph: &MultiGraph, s: &VertexSet, t: &EdgeSet, k: usize) -> TreePackingReport {
    let s_connected = match steiner_connectivity(graph, s) {
        Ok((c, _)) => c >= 3 * k as u64,
        Err(_) => s.len() == 1 && graph.has_vertex(*s.first().unwrap()),
    };
    let others: Vec<VertexId> = graph.vertices().filter(|v| !s.contains(v)).collect();
    let nonterminals_degree3 = others.iter().all(|&v| graph.degree(v).map(|d| d == 3).unwrap_or(false));
    let nonterminals_independent = graph
        .edges()
        .all(|(_, e)| s.contains(&e.u) || s.contains(&e.v));
    let deleted_ok = t.len() <= k && t.iter().all(|&e| graph.has_edge(e));
    TreePackingReport { s_connected, nonterminals_degree3, nonterminals_independent, deleted_ok }
}
