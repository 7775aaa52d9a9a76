mod common;

use std::collections::BTreeSet;

use attrcs_core::graph::{
    core_decomposition, induced_subgraph, maximal_connected_kcore, maximal_connected_ktruss,
    AttributedGraph, GraphBuilder, NodeId, Structure,
};
use common::{id, names, two_cliques};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gnp(n: usize, p: f64, seed: u64) -> AttributedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new();
    for v in 0..n {
        b.node(&v.to_string());
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                b.edge(&u.to_string(), &v.to_string());
            }
        }
    }
    b.build().unwrap().0
}

fn adjacency(g: &AttributedGraph, nodes: &BTreeSet<NodeId>) -> Vec<(NodeId, NodeId)> {
    let mut edges = Vec::new();
    for &u in nodes {
        for &v in g.neighbors(u) {
            if u < v && nodes.contains(&v) {
                edges.push((u, v));
            }
        }
    }
    edges
}

fn component(edges: &[(NodeId, NodeId)], q: NodeId) -> BTreeSet<NodeId> {
    let mut seen = BTreeSet::from([q]);
    loop {
        let before = seen.len();
        for &(u, v) in edges {
            if seen.contains(&u) || seen.contains(&v) {
                seen.insert(u);
                seen.insert(v);
            }
        }
        if seen.len() == before {
            return seen;
        }
    }
}

/// Peel nodes of degree < k from scratch, then keep q's component.
fn naive_core(g: &AttributedGraph, nodes: BTreeSet<NodeId>, q: NodeId, k: usize) -> Vec<NodeId> {
    let mut alive = nodes;
    loop {
        let edges = adjacency(g, &alive);
        let low: Vec<NodeId> = alive
            .iter()
            .copied()
            .filter(|&v| edges.iter().filter(|&&(a, b)| a == v || b == v).count() < k)
            .collect();
        if low.is_empty() {
            break;
        }
        for v in low {
            alive.remove(&v);
        }
    }
    if !alive.contains(&q) {
        return Vec::new();
    }
    component(&adjacency(g, &alive), q).into_iter().collect()
}

/// Peel edges in fewer than k - 2 triangles, then keep the nodes on q's
/// edge component.
fn naive_truss(g: &AttributedGraph, nodes: BTreeSet<NodeId>, q: NodeId, k: usize) -> Vec<NodeId> {
    let mut edges: BTreeSet<(NodeId, NodeId)> = adjacency(g, &nodes).into_iter().collect();
    let has =
        |e: &BTreeSet<(NodeId, NodeId)>, a: NodeId, b: NodeId| e.contains(&(a.min(b), a.max(b)));
    loop {
        let weak: Vec<(NodeId, NodeId)> = edges
            .iter()
            .copied()
            .filter(|&(u, v)| {
                nodes
                    .iter()
                    .filter(|&&w| has(&edges, u, w) && has(&edges, v, w))
                    .count()
                    < k - 2
            })
            .collect();
        if weak.is_empty() {
            break;
        }
        for e in weak {
            edges.remove(&e);
        }
    }
    let edges: Vec<_> = edges.into_iter().collect();
    if !edges.iter().any(|&(u, v)| u == q || v == q) {
        return Vec::new();
    }
    component(&edges, q).into_iter().collect()
}

#[test]
fn coreness_of_two_cliques() {
    let g = two_cliques();
    let core = core_decomposition(&g);
    assert_eq!(g.degree(id(&g, "v12")), 1);
    assert_eq!(core[id(&g, "v12") as usize], 1);
    for v in ["v2", "v3", "v4", "v5", "v7", "v8", "v9", "v10"] {
        assert_eq!(core[id(&g, v) as usize], 3, "{v}");
    }
}

#[test]
fn three_core_around_v5() {
    let g = two_cliques();
    let h3 = maximal_connected_kcore(&g, id(&g, "v5"), 3).unwrap();
    assert_eq!(names(&g, &h3.members()), ["v2", "v3", "v4", "v5"]);
    let h2 = maximal_connected_kcore(&g, id(&g, "v5"), 2).unwrap();
    assert_eq!(
        names(&g, &h2.members()),
        ["v1", "v2", "v3", "v4", "v5", "v6"]
    );
}

#[test]
fn two_core_excludes_pendant() {
    let g = two_cliques();
    let core = core_decomposition(&g);
    let h2: Vec<NodeId> = (0..g.node_count() as NodeId)
        .filter(|&v| core[v as usize] >= 2)
        .collect();
    let s = induced_subgraph(&g, &h2, Structure::core(2));
    assert_eq!(s.len(), 11);
    assert!(!s.contains(id(&g, "v12")));
    assert_eq!(s.edges().len(), g.edge_count() - 1);
}

#[test]
fn induced_full_and_disjoint_pair() {
    let g = two_cliques();
    let all: Vec<NodeId> = (0..g.node_count() as NodeId).collect();
    let s = induced_subgraph(&g, &all, Structure::core(1));
    assert_eq!(s.len(), 12);
    assert_eq!(s.edges().len(), g.edge_count());
    let pair = induced_subgraph(&g, &[id(&g, "v1"), id(&g, "v12")], Structure::core(1));
    assert_eq!(pair.len(), 2);
    assert!(pair.edges().is_empty());
}

#[test]
fn deleting_v1_keeps_two_core() {
    let g = two_cliques();
    let q = id(&g, "v5");
    let mut s = maximal_connected_kcore(&g, q, 2).unwrap();
    let dist = vec![0.0; s.local().len()];
    let ql = s.local().local_of(q).unwrap();
    let v1 = s.local().local_of(id(&g, "v1")).unwrap();
    let d = s.delete_and_maintain(v1, ql, &dist).unwrap();
    assert_eq!(d.removed(), [v1]);
    assert_eq!(d.v_m(), Some(v1));
    assert_eq!(names(&g, &s.members()), ["v2", "v3", "v4", "v5", "v6"]);
}

#[test]
fn random_kcore_matches_naive_peel() {
    for seed in 0..100 {
        let g = gnp(10, 0.5, seed);
        for q in 0..10 {
            let all: BTreeSet<NodeId> = (0..10).collect();
            let got = maximal_connected_kcore(&g, q, 2).unwrap().members();
            assert_eq!(got, naive_core(&g, all, q, 2), "seed {seed} q {q}");
        }
    }
}

#[test]
fn random_ktruss_matches_naive_peel() {
    for seed in 0..60 {
        let g = gnp(12, 0.5, seed);
        for q in 0..12 {
            let all: BTreeSet<NodeId> = (0..12).collect();
            let s = maximal_connected_ktruss(&g, q, 3).unwrap();
            assert_eq!(s.members(), naive_truss(&g, all, q, 3), "seed {seed} q {q}");
            if !s.is_empty() {
                assert!(s.is_valid(q));
            }
        }
    }
}

fn check_deletion(g: &AttributedGraph, structure: Structure, q: NodeId, pick: usize, seed: u64) {
    let mut state = match structure.model {
        attrcs_core::Model::Core => maximal_connected_kcore(g, q, structure.k).unwrap(),
        attrcs_core::Model::Truss => maximal_connected_ktruss(g, q, structure.k).unwrap(),
    };
    if state.len() < 2 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist: Vec<f64> = (0..state.local().len()).map(|_| rng.random()).collect();
    let before_members = state.members();
    let before_edges = state.edges();
    let ql = state.local().local_of(q).unwrap();
    let others: Vec<u32> = state.local_members().filter(|&v| v != ql).collect();
    let v = others[pick % others.len()];
    let vg = state.local().global(v);

    let d = state.delete_and_maintain(v, ql, &dist).unwrap();
    let rest: BTreeSet<NodeId> = before_members
        .iter()
        .copied()
        .filter(|&x| x != vg)
        .collect();
    let expected = match structure.model {
        attrcs_core::Model::Core => naive_core(g, rest, q, structure.k),
        attrcs_core::Model::Truss => naive_truss(g, rest, q, structure.k),
    };
    assert_eq!(state.members(), expected);
    assert_eq!(d.query_lost(), expected.is_empty());
    if !expected.is_empty() {
        assert!(state.is_valid(q));
    }
    let vm = d.v_m().unwrap();
    assert!(d
        .removed()
        .iter()
        .all(|&r| dist[r as usize] < dist[vm as usize]
            || (dist[r as usize] == dist[vm as usize] && r >= vm)));

    state.undo(d);
    assert_eq!(state.members(), before_members);
    assert_eq!(state.edges(), before_edges);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn core_deletion_equals_repeel(seed in any::<u64>(), q in 0u32..15, k in 1usize..4, pick in any::<usize>()) {
        let g = gnp(15, 0.4, seed);
        check_deletion(&g, Structure::core(k), q, pick, seed);
    }

    #[test]
    fn truss_deletion_equals_repeel(seed in any::<u64>(), q in 0u32..15, k in 3usize..5, pick in any::<usize>()) {
        let g = gnp(15, 0.5, seed);
        check_deletion(&g, Structure::truss(k), q, pick, seed);
    }
}
