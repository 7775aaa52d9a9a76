#![allow(dead_code)]

use attrcs_core::graph::{AttributedGraph, GraphBuilder, NodeId, Structure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two components, one numeric attribute, no tokens (use gamma = 0).
/// Values on the query's component: v5 = 0 (the query), v1 = .7, v2 = v3 =
/// .6, v4 = .5, v6 = .3; v7 pins the normalization range to [0, 1].
pub fn two_cliques() -> AttributedGraph {
    let values = [
        ("v1", 0.7),
        ("v2", 0.6),
        ("v3", 0.6),
        ("v4", 0.5),
        ("v5", 0.0),
        ("v6", 0.3),
        ("v7", 1.0),
        ("v8", 0.9),
        ("v9", 0.9),
        ("v10", 0.8),
        ("v11", 0.8),
        ("v12", 0.2),
    ];
    let mut b = GraphBuilder::new();
    for (name, x) in values {
        b.attributes(name, std::iter::empty::<&str>(), &[x])
            .unwrap();
    }
    let clique = |b: &mut GraphBuilder, nodes: &[&str]| {
        for (i, u) in nodes.iter().enumerate() {
            for v in &nodes[i + 1..] {
                b.edge(u, v);
            }
        }
    };
    clique(&mut b, &["v2", "v3", "v4", "v5"]);
    for (u, v) in [("v1", "v2"), ("v1", "v4"), ("v6", "v3"), ("v6", "v5")] {
        b.edge(u, v);
    }
    clique(&mut b, &["v7", "v8", "v9", "v10"]);
    for (u, v) in [("v11", "v7"), ("v11", "v8"), ("v12", "v11")] {
        b.edge(u, v);
    }
    b.build().unwrap().0
}

pub fn id(g: &AttributedGraph, name: &str) -> NodeId {
    g.id(name).unwrap()
}

pub fn names(g: &AttributedGraph, members: &[NodeId]) -> Vec<String> {
    let mut out: Vec<String> = members.iter().map(|&v| g.name(v).to_string()).collect();
    out.sort();
    out
}

pub struct Instance {
    pub graph: AttributedGraph,
    pub q: NodeId,
    pub structure: Structure,
    pub gamma: f64,
}

/// A small random attributed graph: 6 to 12 nodes, G(n, p) edges with p in
/// [0.35, 0.8], tokens from a 6-word vocabulary, two numeric dimensions.
/// `index` picks the model and k in {2, 3} round-robin.
pub fn random_instance(seed: u64, index: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(6..=12usize);
    let p = rng.random_range(0.35..0.8);
    let mut b = GraphBuilder::new();
    for v in 0..n {
        let tokens: Vec<String> = (0..6)
            .filter(|_| rng.random_bool(0.4))
            .map(|t| format!("t{t}"))
            .collect();
        let x = [
            (rng.random_range(0..20) as f64) / 4.0,
            rng.random_range(0.0..10.0),
        ];
        b.attributes(&format!("n{v}"), tokens.iter().map(String::as_str), &x)
            .unwrap();
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                b.edge(&format!("n{u}"), &format!("n{v}"));
            }
        }
    }
    let graph = b.build().unwrap().0;
    let k = 2 + (index / 2) % 2;
    let structure = if index.is_multiple_of(2) {
        Structure::core(k)
    } else {
        Structure::truss(k)
    };
    let q = rng.random_range(0..n as NodeId);
    let gamma = [0.0, 0.3, 0.5, 0.7, 1.0][rng.random_range(0..5)];
    Instance {
        graph,
        q,
        structure,
        gamma,
    }
}
