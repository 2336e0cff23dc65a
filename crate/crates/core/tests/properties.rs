mod common;

use proptest::prelude::*;

use forestpack::io::{format_graph, parse_graph};
use forestpack::packing::{exact_pack, pack_spanning_trees, verify_packing, PackOptions};
use forestpack::transforms::{edge_union, loop_for_edge, restore_loops, suppress_degree2};
use forestpack::{EdgeSet, MultiGraph, TerminalSystem, VertexId, VertexSet};

use common::*;

fn build(n: usize, pairs: &[(usize, usize)]) -> (MultiGraph, Vec<VertexId>) {
    let mut g = MultiGraph::new();
    let vs: Vec<VertexId> = (0..n).map(|_| g.add_vertex()).collect();
    for &(a, b) in pairs {
        g.add_edge(vs[a % n], vs[b % n]).unwrap();
    }
    (g, vs)
}

fn arb_graph(max_n: usize, max_m: usize) -> impl Strategy<Value = (MultiGraph, Vec<VertexId>, u32)> {
    (2..=max_n, proptest::collection::vec((0usize..16, 0usize..16), 0..=max_m), any::<u32>())
        .prop_map(|(n, pairs, bits)| {
            let (g, vs) = build(n, &pairs);
            (g, vs, bits)
        })
}

fn subset(vs: &[VertexId], bits: u32) -> VertexSet {
    vs.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &v)| v).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn opposite_contractions_share_the_cut((g, vs, bits) in arb_graph(8, 16)) {
        let c1 = subset(&vs, bits);
        prop_assume!(!c1.is_empty() && c1.len() < vs.len());
        let c2: VertexSet = vs.iter().copied().filter(|v| !c1.contains(v)).collect();
        let (g1, v2, b1) = g.contract(&c2).unwrap();
        let (g2, v1, b2) = g.contract(&c1).unwrap();
        prop_assert_eq!(&b1, &b2);
        prop_assert_eq!(g1.incident(v2).unwrap(), g2.incident(v1).unwrap());
        prop_assert_eq!(&b1, &g.boundary(&c1));
    }

    #[test]
    fn text_format_round_trips((g, vs, bits) in arb_graph(8, 16)) {
        let s = subset(&vs, bits);
        prop_assume!(!s.is_empty());
        let ts = TerminalSystem::single(s);
        let (h, ts2) = parse_graph(&format_graph(&g, &ts)).unwrap();
        let a: Vec<_> = g.edges().map(|(id, e)| (id, e.u, e.v)).collect();
        let b: Vec<_> = h.edges().map(|(id, e)| (id, e.u, e.v)).collect();
        prop_assert_eq!(a, b);
        prop_assert_eq!(ts, ts2);
    }

    #[test]
    fn subdivision_keeps_steiner_connectivity((g, vs, bits) in arb_graph(7, 14), pick in 0usize..64) {
        let s = subset(&vs, bits);
        prop_assume!(s.len() >= 2 && g.edge_count() > 0);
        let e = g.edge_ids().nth(pick % g.edge_count()).unwrap();
        let mut h = g.clone();
        let (m, a, b) = h.subdivide(e).unwrap();
        prop_assert!(!h.has_edge(e) && h.has_edge(a) && h.has_edge(b));
        prop_assert!(!s.contains(&m));
        prop_assert_eq!(brute_steiner(&g, &s), brute_steiner(&h, &s));
    }

    #[test]
    fn suppression_keeps_steiner_connectivity((g, vs, bits) in arb_graph(7, 14), pick in 0usize..64) {
        let e = match g.edge_ids().nth(pick % g.edge_count().max(1)) { Some(e) => e, None => return Ok(()) };
        prop_assume!(!g.edge(e).unwrap().is_loop());
        let mut h = g.clone();
        let (u, _, _) = h.subdivide(e).unwrap();
        let s = subset(&vs, bits);
        prop_assume!(s.len() >= 2);
        let (back, rec) = suppress_degree2(&h, u).unwrap();
        prop_assert!(!back.has_vertex(u));
        prop_assert_eq!(brute_steiner(&h, &s), brute_steiner(&back, &s));
        let full: EdgeSet = back.edge_ids().collect();
        prop_assert!(rec.expand(&full).is_superset(&[rec.replaced.0, rec.replaced.1].into()));
    }

    #[test]
    fn loop_bookkeeping_round_trips((g, vs, bits) in arb_graph(7, 14), pick in 0usize..64) {
        prop_assume!(g.edge_count() > 0);
        let e = g.edge_ids().nth(pick % g.edge_count()).unwrap();
        let reserve = subset(&vs, bits);
        let (h, map) = loop_for_edge(&g, e, &reserve).unwrap();
        for &w in &reserve {
            prop_assert_eq!(h.incident_edge_count(w).unwrap(), g.incident_edge_count(w).unwrap());
        }
        let back = restore_loops(&h, &map).unwrap();
        let a: Vec<_> = g.edges().map(|(id, e)| (id, e.u, e.v)).collect();
        let b: Vec<_> = back.edges().map(|(id, e)| (id, e.u, e.v)).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn edge_union_is_induced((g, _vs, bits) in arb_graph(7, 14), more in any::<u32>()) {
        let ids: Vec<_> = g.edge_ids().collect();
        let a: EdgeSet = ids.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &e)| e).collect();
        let b: EdgeSet = ids.iter().enumerate().filter(|(i, _)| more >> i & 1 == 1).map(|(_, &e)| e).collect();
        let h = edge_union(&g, &a, &b).unwrap();
        let got: EdgeSet = h.edge_ids().collect();
        prop_assert_eq!(got, a.union(&b).copied().collect::<EdgeSet>());
        for (id, e) in h.edges() {
            prop_assert_eq!(g.edge(id).unwrap(), e);
        }
    }

    #[test]
    fn exact_search_is_deterministic_and_verified((g, vs, bits) in arb_graph(6, 11), k in 1usize..=2) {
        let s = subset(&vs, bits);
        prop_assume!(s.len() >= 2);
        let ts = TerminalSystem::single(s);
        let opts = PackOptions::with_budget(0);
        let (a, _) = exact_pack(&g, &ts, k, &opts).unwrap();
        let (b, _) = exact_pack(&g, &ts, k, &opts).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.packing().is_some(), naive_packable(&g, &ts, k));
        if let Some(p) = a.packing() {
            prop_assert!(verify_packing(&g, &ts, p, &PackOptions::default()).passed());
        }
    }

    #[test]
    fn spanning_trees_match_enumeration((g, vs, _bits) in arb_graph(6, 12), k in 1usize..=3) {
        prop_assume!(g.is_connected());
        let all: VertexSet = vs.iter().copied().collect();
        let ts = TerminalSystem::single(all);
        let out = pack_spanning_trees(&g, k).unwrap();
        prop_assert_eq!(out.packing().is_some(), naive_packable(&g, &ts, k));
    }
}
