//! Attribute distances between nodes and the q-centric community distance.

use crate::error::{Error, Result};
use crate::graph::{AttributedGraph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceParams {
    /// Weight of the textual part; `1 - gamma` goes to the numeric part.
    pub gamma: f64,
    pub query: NodeId,
}

impl DistanceParams {
    pub fn new(gamma: f64, query: NodeId) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::Config(format!(
                "gamma must lie in [0, 1], got {gamma}"
            )));
        }
        Ok(DistanceParams { gamma, query })
    }
}

/// Jaccard distance of two sorted, deduplicated token lists. Two empty sets
/// are identical (distance 0).
pub fn jaccard_distance(a: &[u32], b: &[u32]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - common;
    1.0 - common as f64 / union as f64
}

/// Mean absolute difference over the dimensions where both values are
/// present. Returns 1 when nothing is comparable.
pub fn manhattan_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut used = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        if x.is_nan() || y.is_nan() {
            continue;
        }
        total += (x - y).abs();
        used += 1;
    }
    if used == 0 {
        1.0
    } else {
        (total / used as f64).clamp(0.0, 1.0)
    }
}

pub fn textual_distance(graph: &AttributedGraph, u: NodeId, v: NodeId) -> f64 {
    jaccard_distance(graph.tokens(u), graph.tokens(v))
}

/// Manhattan distance over values normalized with the graph-wide table.
pub fn numerical_distance(graph: &AttributedGraph, u: NodeId, v: NodeId) -> f64 {
    manhattan_distance(graph.numeric(u), graph.numeric(v))
}

pub fn composite_distance(graph: &AttributedGraph, u: NodeId, v: NodeId, gamma: f64) -> f64 {
    // Skip the side with zero weight so a graph without numeric attributes
    // (or without tokens) still measures 0 between identical nodes.
    let text = if gamma > 0.0 {
        gamma * textual_distance(graph, u, v)
    } else {
        0.0
    };
    let num = if gamma < 1.0 {
        (1.0 - gamma) * numerical_distance(graph, u, v)
    } else {
        0.0
    };
    (text + num).clamp(0.0, 1.0)
}

/// Compensated (Neumaier) summation.
pub fn stable_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Average distance to `q` over `members` without `q`. Members are summed in
/// ascending id order, so equal sets always give bit-identical values.
pub fn community_attribute_distance(
    members: &[NodeId],
    q: NodeId,
    dist: impl Fn(NodeId) -> f64,
) -> Result<f64> {
    if members.len() < 2 {
        return Err(Error::Contract(
            "community distance needs at least two members".into(),
        ));
    }
    let mut sorted;
    let members = if members.windows(2).all(|w| w[0] < w[1]) {
        members
    } else {
        sorted = members.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        &sorted
    };
    if members.binary_search(&q).is_err() {
        return Err(Error::Contract(
            "community must contain the query node".into(),
        ));
    }
    let sum = stable_sum(members.iter().filter(|&&v| v != q).map(|&v| dist(v)));
    Ok(sum / (members.len() - 1) as f64)
}

/// Lazily memoized f(·, q) for one query.
#[derive(Debug, Clone)]
pub struct DistanceCache<'g> {
    graph: &'g AttributedGraph,
    params: DistanceParams,
    values: Vec<f64>,
}

impl<'g> DistanceCache<'g> {
    pub fn new(graph: &'g AttributedGraph, params: DistanceParams) -> Self {
        DistanceCache {
            graph,
            params,
            values: vec![f64::NAN; graph.node_count()],
        }
    }

    pub fn graph(&self) -> &'g AttributedGraph {
        self.graph
    }

    pub fn params(&self) -> DistanceParams {
        self.params
    }

    pub fn get(&mut self, v: NodeId) -> f64 {
        let slot = &mut self.values[v as usize];
        if slot.is_nan() {
            *slot = composite_distance(self.graph, v, self.params.query, self.params.gamma);
        }
        *slot
    }

    /// Distances for a list of nodes, in the same order.
    pub fn distances(&mut self, nodes: &[NodeId]) -> Vec<f64> {
        nodes.iter().map(|&v| self.get(v)).collect()
    }
}
