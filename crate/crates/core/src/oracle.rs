//! Exhaustive reference solver and a from-scratch community validator.
//!
//! Nothing here touches the incremental bookkeeping or the pruning rules of
//! the exact search; both functions recompute everything from the graph.

use crate::error::{Error, Result};
use crate::exact::{prefer, Community};
use crate::extensions::SizeBounds;
use crate::graph::{AttributedGraph, Model, NodeId, Structure};
use crate::metrics::{community_attribute_distance, DistanceCache, DistanceParams};

/// Largest component the exhaustive solver accepts.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Whether `members` is a connected k-core, or a node set spanned by a
/// connected k-truss, containing `q`. For trusses the edges used are the
/// maximal k-truss of the induced subgraph.
pub fn is_valid_community(
    graph: &AttributedGraph,
    members: &[NodeId],
    q: NodeId,
    structure: Structure,
) -> bool {
    let mut nodes = members.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    if nodes.len() != members.len() || nodes.len() < structure.min_size() {
        return false;
    }
    let Ok(qi) = nodes.binary_search(&q) else {
        return false;
    };
    let n = nodes.len();
    let mut adj = vec![vec![false; n]; n];
    for (i, &u) in nodes.iter().enumerate() {
        for (j, &v) in nodes.iter().enumerate() {
            adj[i][j] = i != j && graph.has_edge(u, v);
        }
    }
    match structure.model {
        Model::Core => {
            let ok = adj
                .iter()
                .all(|row| row.iter().filter(|&&x| x).count() >= structure.k);
            ok && reaches_all(&adj, qi)
        }
        Model::Truss => {
            let need = structure.k.saturating_sub(2);
            loop {
                let mut weak = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        if adj[i][j] {
                            let support = (0..n).filter(|&x| adj[i][x] && adj[j][x]).count();
                            if support < need {
                                weak.push((i, j));
                            }
                        }
                    }
                }
                if weak.is_empty() {
                    break;
                }
                for (i, j) in weak {
                    adj[i][j] = false;
                    adj[j][i] = false;
                }
            }
            reaches_all(&adj, qi)
        }
    }
}

fn reaches_all(adj: &[Vec<bool>], start: usize) -> bool {
    let n = adj.len();
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut stack = vec![start];
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for w in 0..n {
            if adj[v][w] && !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

/// Tries every node subset of q's component. Refuses components larger than
/// [`BRUTE_FORCE_LIMIT`].
pub fn brute_force_optimum(
    graph: &AttributedGraph,
    params: DistanceParams,
    structure: Structure,
    bounds: Option<SizeBounds>,
) -> Result<Option<Community>> {
    let q = params.query;
    if (q as usize) >= graph.node_count() {
        return Err(Error::NodeNotFound(q.to_string()));
    }
    let mut others = graph.component_of(q);
    if others.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::Config(format!(
            "component of {} nodes exceeds the brute-force limit of {BRUTE_FORCE_LIMIT}",
            others.len()
        )));
    }
    others.retain(|&v| v != q);
    others.sort_unstable();
    let mut cache = DistanceCache::new(graph, params);
    let dist: Vec<f64> = (0..graph.node_count() as NodeId)
        .map(|v| cache.get(v))
        .collect();

    let mut best: Option<Community> = None;
    for mask in 1u32..(1u32 << others.len()) {
        let mut members: Vec<NodeId> = others
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &v)| v)
            .collect();
        members.push(q);
        members.sort_unstable();
        if bounds.is_some_and(|b| !b.contains(members.len())) {
            continue;
        }
        if !is_valid_community(graph, &members, q, structure) {
            continue;
        }
        let delta = community_attribute_distance(&members, q, |v| dist[v as usize])?;
        let better = match &best {
            None => true,
            Some(b) => prefer(delta, &members, b.delta, &b.members),
        };
        if better {
            best = Some(Community { members, delta });
        }
    }
    Ok(best)
}
