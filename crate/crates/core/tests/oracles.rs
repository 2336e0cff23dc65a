mod common;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use forestpack::connectivity::{
    constrained_min_cut, min_cost_disjoint_paths, min_terminal_separating_cut, steiner_connectivity,
};
use forestpack::generate::random_multigraph;
use forestpack::kg_family::{audit_kg, make_parity_g, DEFAULT_AUDIT_BOUND};
use forestpack::packing::{
    exact_pack, normalize_subpartition, EdgeSubpartition, ExactOutcome, PackOptions,
};
use forestpack::transforms::add_fake_edges;
use forestpack::{EdgeId, Error, TerminalSystem, VertexSet};

use common::*;

#[test]
fn steiner_matches_bipartitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.gen_range(2..=10);
        let m = rng.gen_range(0..=3 * n);
        let (g, mut vs) = random_multigraph(&mut rng, n, m);
        vs.shuffle(&mut rng);
        let size = rng.gen_range(2..=n);
        let s: VertexSet = vs[..size].iter().copied().collect();
        let (value, cert) = steiner_connectivity(&g, &s).unwrap();
        assert_eq!(value, brute_steiner(&g, &s));
        assert_eq!(cert.crossing.len() as u64, value);
    }
}

#[test]
fn separating_cut_matches_bipartitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..150 {
        let n = rng.gen_range(4..=9);
        let m = rng.gen_range(n..=3 * n);
        let (g, mut vs) = random_multigraph(&mut rng, n, m);
        vs.shuffle(&mut rng);
        let t = rng.gen_range(2..=(n / 2).min(3));
        let groups: Vec<VertexSet> = vs.chunks(2).take(t).map(|c| c.iter().copied().collect()).collect();
        let ts = TerminalSystem::new(groups, VertexSet::new());
        let (value, _, split) = min_terminal_separating_cut(&g, &ts).unwrap();
        assert_eq!(value, brute_separating(&g, &ts));
        assert!(!split.side_a.is_empty() && !split.side_b.is_empty());
    }
}

#[test]
fn separating_cut_examples() {
    // two triangles doubled inside, joined by 2 edges
    let (g, vs, _) = graph(
        6,
        &[(0, 1), (1, 2), (2, 0), (0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (3, 4), (4, 5), (5, 3), (0, 3), (2, 5)],
    );
    let ts = TerminalSystem::new(vec![[vs[0], vs[1], vs[2]].into(), [vs[3], vs[4], vs[5]].into()], VertexSet::new());
    assert_eq!(min_terminal_separating_cut(&g, &ts).unwrap().0, 2);
    // three groups pairwise joined by single edges
    let (g, vs, _) = graph(3, &[(0, 1), (1, 2), (2, 0)]);
    let ts = TerminalSystem::new(vs.iter().map(|&v| [v].into()).collect(), VertexSet::new());
    let (value, _, _) = min_terminal_separating_cut(&g, &ts).unwrap();
    assert_eq!(value, 2);
    assert_eq!(brute_separating(&g, &ts), 2);
}

#[test]
fn min_cost_paths_match_tuple_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut checked = 0;
    while checked < 150 {
        let n = rng.gen_range(2..=7);
        let m = rng.gen_range(n..=2 * n + 2);
        let (g, vs) = random_multigraph(&mut rng, n, m);
        let (s, t) = (vs[0], vs[n - 1]);
        let f = rng.gen_range(1..=3);
        let brute = brute_min_cost(&g, s, t, f);
        match min_cost_disjoint_paths(&g, s, t, f) {
            Ok(sys) => {
                let total: usize = sys.paths.iter().map(Vec::len).sum();
                assert_eq!(Some(total), brute);
                assert_eq!(sys.len(), f);
                assert!(sys.is_edge_disjoint());
                for w in sys.walks(&g).unwrap() {
                    assert_eq!(*w.last().unwrap(), t);
                    let mut seen = w.clone();
                    seen.sort();
                    seen.dedup();
                    assert_eq!(seen.len(), w.len(), "path is not simple");
                }
            }
            Err(Error::InsufficientConnectivity { .. }) => assert_eq!(brute, None),
            Err(e) => panic!("{e}"),
        }
        checked += 1;
    }
}

#[test]
fn extension_search_matches_assignment_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let (mut feasible, mut total) = (0, 0);
    while total < 120 {
        let n = rng.gen_range(3..=5);
        let m = rng.gen_range(n..=8);
        let (g, vs) = random_multigraph(&mut rng, n, m);
        let k = rng.gen_range(1..=2);
        let v = vs[0];
        let at: Vec<EdgeId> = g.incident(v).unwrap().iter().copied().collect();
        if at.is_empty() {
            continue;
        }
        let labels: Vec<(EdgeId, usize)> = at.iter().map(|&e| (e, rng.gen_range(0..=k))).collect();
        let sp = EdgeSubpartition::from_labels(&g, v, k, labels).unwrap();
        let s: VertexSet = vs[1..].iter().copied().filter(|_| rng.gen_bool(0.7)).collect();
        if s.is_empty() {
            continue;
        }
        let mut opts = PackOptions { extend: Some(sp), ..Default::default() };
        if rng.gen_bool(0.3) {
            opts.balance.insert(vs[1]);
        }
        let ts = TerminalSystem::single(s);
        let oracle = naive_constrained(&g, &ts, k, &opts);
        let (out, _) = exact_pack(&g, &ts, k, &opts).unwrap();
        assert_ne!(out, ExactOutcome::Timeout);
        assert_eq!(out.packing().is_some(), oracle, "{g:?} {opts:?}");
        feasible += oracle as usize;
        total += 1;
    }
    assert!(feasible > 10 && feasible < total - 10, "degenerate corpus: {feasible}/{total}");
}

#[test]
fn balance_counting_rule_matches_enumeration() {
    // a subpartition is balanced when some completion has every part of size >= 2
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..300 {
        let d = rng.gen_range(1..=7);
        let k = rng.gen_range(1..=3);
        let mut g = forestpack::MultiGraph::new();
        let v = g.add_vertex();
        let w = g.add_vertex();
        let es: Vec<EdgeId> = (0..d).map(|_| g.add_edge(v, w).unwrap()).collect();
        let labels: Vec<usize> = es.iter().map(|_| rng.gen_range(0..=k)).collect();
        let sp = EdgeSubpartition::from_labels(&g, v, k, es.iter().copied().zip(labels.iter().copied())).unwrap();
        let free: Vec<usize> = (0..d).filter(|&i| labels[i] == 0).collect();
        let completions = k.pow(free.len() as u32);
        let brute = (0..completions).any(|mut code| {
            let mut sizes = vec![0usize; k];
            for &l in &labels {
                let part = if l > 0 {
                    l - 1
                } else {
                    let p = code % k;
                    code /= k;
                    p
                };
                sizes[part] += 1;
            }
            sizes.iter().all(|&s| s >= 2)
        });
        assert_eq!(forestpack::packing::is_balanced_subpartition(&g, &sp), brute, "{labels:?} k={k}");
    }
}

#[test]
fn audit_counts_match_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..40 {
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(0..=2 * n);
        let (g, mut vs) = random_multigraph(&mut rng, n, m);
        vs.shuffle(&mut rng);
        let size = rng.gen_range(1..=n);
        let s: VertexSet = vs[..size].iter().copied().collect();
        let pf = make_parity_g(&g, &s);
        let audit = audit_kg(&g, &s, &pf, 1, DEFAULT_AUDIT_BOUND).unwrap();
        assert_eq!(audit.partitions, admissible_count(n as u64, size as u64));
    }
    assert_eq!(admissible_count(3, 1), 4);
    assert_eq!(stirling2(5, 2), 15);
}

#[test]
fn normalization_leaves_enough_free_edges() {
    // degree (2t+3)k split into k + ceil(2k/(2t+1)) parts; after keeping the
    // k smallest, free plus filled edges make up at least 2/(2t+3) of the degree
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..300 {
        let t = rng.gen_range(3..=6usize);
        let k = rng.gen_range(1..=4usize);
        let k_in = k + (2 * k).div_ceil(2 * t + 1);
        let d = (2 * t + 3) * k;
        let mut g = forestpack::MultiGraph::new();
        let v = g.add_vertex();
        let w = g.add_vertex();
        let es: Vec<EdgeId> = (0..d).map(|_| g.add_edge(v, w).unwrap()).collect();
        let labels = es.iter().map(|&e| (e, rng.gen_range(0..=k_in)));
        let sp = EdgeSubpartition::from_labels(&g, v, k_in, labels).unwrap();
        let out = normalize_subpartition(&sp, k).unwrap();
        let empty_before = forestpack::packing::keep_smallest_parts(&sp, k)
            .unwrap()
            .part_sizes()
            .iter()
            .filter(|&&s| s == 0)
            .count();
        let free = out.unlabeled_edges().len();
        assert!(out.part_sizes().iter().all(|&s| s > 0));
        assert!((free + empty_before) * (2 * t + 3) >= 2 * d, "t={t} k={k} free={free}");
    }
}

#[test]
fn fake_edges_lift_the_contracted_vertex() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let mut checked = 0;
    while checked < 100 {
        let n = rng.gen_range(5..=9);
        let m = rng.gen_range(2 * n..=4 * n);
        let (g, mut vs) = random_multigraph(&mut rng, n, m);
        vs.shuffle(&mut rng);
        let groups: Vec<VertexSet> = vs.chunks(2).take(2).map(|c| c.iter().copied().collect()).collect();
        let ts = TerminalSystem::new(groups, VertexSet::new());
        let Ok((_, cut, split)) = min_terminal_separating_cut(&g, &ts) else { continue };
        // contract the side holding group 0 and pad towards the other side's terminals
        let big = cut.side_a.clone();
        if big.len() == g.vertex_count() {
            continue;
        }
        let small_terms: VertexSet = split.side_b.iter().flat_map(|&j| ts.groups[j].iter().copied()).collect();
        let (h, v, _) = g.contract(&big).unwrap();
        let prev = steiner_connectivity(&h, &small_terms).unwrap().0;
        let target = h.incident_edge_count(v).unwrap() + rng.gen_range(0..=6);
        let anchor = *small_terms.first().unwrap();
        let (aug, rec) = add_fake_edges(&h, v, target, anchor).unwrap();
        assert_eq!(rec.edge_ids.len() + h.incident_edge_count(v).unwrap(), target);
        let (after, _) = constrained_min_cut(&aug, &[v].into(), &small_terms).unwrap();
        assert!(after >= prev.min(target as u64), "after {after}, before {prev}, target {target}");
        checked += 1;
    }
}
