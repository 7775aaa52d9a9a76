//! Attributed graph model and structural primitives.
//!
//! An [`AttributedGraph`] is an immutable, simple, undirected graph in CSR
//! form. Every node carries a set of interned textual tokens and a
//! fixed-length numeric vector; numeric values are min-max normalized once at
//! build time against the whole graph, so distances are query independent.

mod builder;
mod decompose;
mod load;
mod subgraph;

use std::collections::HashMap;

pub use builder::{BuildStats, GraphBuilder};
pub use decompose::core_decomposition;
pub use load::{load_graph, load_graph_files, AttrSchema, GraphSources, LoadReport};
pub(crate) use subgraph::precedes;
pub use subgraph::{
    induced_subgraph, maximal_connected_kcore, maximal_connected_ktruss, Deletion, LocalGraph,
    Model, Structure, Subgraph,
};

/// Dense node id, `0..n`.
pub type NodeId = u32;

/// Read access to a simple undirected adjacency structure.
pub trait Adjacency {
    fn node_count(&self) -> usize;
    fn neighbors(&self, v: u32) -> &[u32];
}

#[derive(Debug, Clone)]
pub struct AttributedGraph {
    pub(crate) offsets: Vec<usize>,
    pub(crate) targets: Vec<NodeId>,
    pub(crate) edge_types: Option<Vec<u32>>,
    pub(crate) node_types: Option<Vec<u32>>,
    pub(crate) tokens: Vec<Vec<u32>>,
    pub(crate) raw: Vec<f64>,
    pub(crate) normalized: Vec<f64>,
    pub(crate) dim: usize,
    pub(crate) norm_table: Vec<(f64, f64)>,
    pub(crate) names: Vec<String>,
    pub(crate) index: HashMap<String, NodeId>,
    pub(crate) type_labels: Vec<String>,
    pub(crate) edge_type_labels: Vec<String>,
    pub(crate) token_labels: Vec<String>,
}

impl AttributedGraph {
    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Edge type ids aligned with [`neighbors`](Self::neighbors), if the edge
    /// file carried a type column.
    pub fn neighbor_edge_types(&self, v: NodeId) -> Option<&[u32]> {
        let v = v as usize;
        self.edge_types
            .as_ref()
            .map(|t| &t[self.offsets[v]..self.offsets[v + 1]])
    }

    pub fn degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Sorted interned token ids of `v`.
    pub fn tokens(&self, v: NodeId) -> &[u32] {
        &self.tokens[v as usize]
    }

    pub fn token_label(&self, token: u32) -> &str {
        &self.token_labels[token as usize]
    }

    /// Numeric schema dimension.
    pub fn numeric_dim(&self) -> usize {
        self.dim
    }

    /// Raw numeric values of `v`; missing entries are NaN.
    pub fn raw_numeric(&self, v: NodeId) -> &[f64] {
        let start = v as usize * self.dim;
        &self.raw[start..start + self.dim]
    }

    /// Values of `v` normalized to [0, 1]; missing entries are NaN.
    pub fn numeric(&self, v: NodeId) -> &[f64] {
        let start = v as usize * self.dim;
        &self.normalized[start..start + self.dim]
    }

    pub fn norm_table(&self) -> &[(f64, f64)] {
        &self.norm_table
    }

    /// Normalizes a raw value of dimension `dim` with the graph-wide bounds.
    pub fn normalize_numeric(&self, raw: f64, dim: usize) -> f64 {
        normalize_numeric(raw, self.norm_table[dim])
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v as usize]
    }

    pub fn id(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_heterogeneous(&self) -> bool {
        self.node_types.is_some()
    }

    pub fn node_type(&self, v: NodeId) -> Option<u32> {
        self.node_types.as_ref().map(|t| t[v as usize])
    }

    pub fn node_type_id(&self, label: &str) -> Option<u32> {
        self.type_labels
            .iter()
            .position(|l| l == label)
            .map(|p| p as u32)
    }

    pub fn edge_type_id(&self, label: &str) -> Option<u32> {
        self.edge_type_labels
            .iter()
            .position(|l| l == label)
            .map(|p| p as u32)
    }

    pub fn node_type_label(&self, ty: u32) -> &str {
        &self.type_labels[ty as usize]
    }

    /// Number of nodes whose type is `ty`.
    pub fn count_of_type(&self, ty: u32) -> usize {
        self.node_types
            .as_ref()
            .map_or(0, |t| t.iter().filter(|&&x| x == ty).count())
    }

    /// Nodes reachable from `q`, in BFS order starting with `q`.
    pub fn component_of(&self, q: NodeId) -> Vec<NodeId> {
        let mut seen = vec![false; self.node_count()];
        let mut order = vec![q];
        seen[q as usize] = true;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &w in self.neighbors(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    order.push(w);
                }
            }
        }
        order
    }
}

impl Adjacency for AttributedGraph {
    fn node_count(&self) -> usize {
        AttributedGraph::node_count(self)
    }

    fn neighbors(&self, v: u32) -> &[u32] {
        AttributedGraph::neighbors(self, v)
    }
}

/// Min-max normalization with the degenerate `max == min` case mapped to 0.
/// Missing values (NaN) pass through unchanged.
pub fn normalize_numeric(raw: f64, (min, max): (f64, f64)) -> f64 {
    if raw.is_nan() {
        return f64::NAN;
    }
    if max <= min {
        return 0.0;
    }
    ((raw - min) / (max - min)).clamp(0.0, 1.0)
}
