use std::collections::HashMap;

use super::{normalize_numeric, AttributedGraph, NodeId};
use crate::error::{Error, Result};

/// Incremental constructor for [`AttributedGraph`].
///
/// Nodes are interned by external name in first-seen order. Self-loops and
/// parallel edges are dropped at [`build`](Self::build) time and counted.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    edges: Vec<(NodeId, NodeId, Option<u32>)>,
    tokens: Vec<Vec<u32>>,
    token_index: HashMap<String, u32>,
    token_labels: Vec<String>,
    numeric: Vec<Option<Vec<f64>>>,
    dim: Option<usize>,
    node_types: Vec<Option<u32>>,
    type_labels: Vec<String>,
    edge_type_labels: Vec<String>,
    norm_override: Option<Vec<(f64, f64)>>,
    self_loops: usize,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct BuildStats {
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fixes the numeric schema dimension up front.
    pub fn with_numeric_dim(mut self, dim: usize) -> Self {
        self.dim = Some(dim);
        self
    }

    /// Uses the given per-dimension bounds instead of computing them from the
    /// nodes added to this builder.
    pub fn with_norm_table(mut self, table: Vec<(f64, f64)>) -> Self {
        self.dim = Some(table.len());
        self.norm_override = Some(table);
        self
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn node(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as NodeId;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.tokens.push(Vec::new());
        self.numeric.push(None);
        self.node_types.push(None);
        id
    }

    pub fn edge(&mut self, u: &str, v: &str) {
        let (u, v) = (self.node(u), self.node(v));
        self.edge_ids(u, v, None);
    }

    pub fn typed_edge(&mut self, u: &str, v: &str, label: &str) {
        let (u, v) = (self.node(u), self.node(v));
        let ty = intern(&mut self.edge_type_labels, label);
        self.edge_ids(u, v, Some(ty));
    }

    fn edge_ids(&mut self, u: NodeId, v: NodeId, ty: Option<u32>) {
        if u == v {
            self.self_loops += 1;
        } else {
            self.edges.push((u, v, ty));
        }
    }

    /// Sets the attributes of `name`; missing numeric entries are NaN.
    pub fn attributes<'a>(
        &mut self,
        name: &str,
        tokens: impl IntoIterator<Item = &'a str>,
        numeric: &[f64],
    ) -> Result<NodeId> {
        match self.dim {
            Some(d) if d != numeric.len() => {
                return Err(Error::Schema(format!(
                    "node {name}: expected {d} numeric values, found {}",
                    numeric.len()
                )))
            }
            None => self.dim = Some(numeric.len()),
            _ => {}
        }
        let id = self.node(name);
        let mut toks: Vec<u32> = tokens
            .into_iter()
            .map(|t| {
                if let Some(&tid) = self.token_index.get(t) {
                    tid
                } else {
                    let tid = self.token_labels.len() as u32;
                    self.token_labels.push(t.to_string());
                    self.token_index.insert(t.to_string(), tid);
                    tid
                }
            })
            .collect();
        toks.sort_unstable();
        toks.dedup();
        self.tokens[id as usize] = toks;
        self.numeric[id as usize] = Some(numeric.to_vec());
        Ok(id)
    }

    pub fn has_attributes(&self, name: &str) -> bool {
        self.index
            .get(name)
            .is_some_and(|&id| self.numeric[id as usize].is_some())
    }

    pub fn node_type(&mut self, name: &str, label: &str) -> NodeId {
        let id = self.node(name);
        let ty = intern(&mut self.type_labels, label);
        self.node_types[id as usize] = Some(ty);
        id
    }

    pub fn build(self) -> Result<(AttributedGraph, BuildStats)> {
        let n = self.names.len();
        if n == 0 {
            return Err(Error::Schema("graph has no nodes".into()));
        }
        let dim = self.dim.unwrap_or(0);

        // Canonical (min, max) orientation, then keep the first occurrence.
        let mut canon: Vec<(NodeId, NodeId, usize)> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v, _))| (u.min(v), u.max(v), i))
            .collect();
        canon.sort_unstable();
        canon.dedup_by(|b, a| a.0 == b.0 && a.1 == b.1);
        let duplicate_edges = self.edges.len() - canon.len();

        let typed = self.edges.iter().any(|e| e.2.is_some());
        let mut edge_type_labels = self.edge_type_labels;
        let untyped = if typed && self.edges.iter().any(|e| e.2.is_none()) {
            intern(&mut edge_type_labels, "")
        } else {
            0
        };

        let mut degree = vec![0usize; n];
        for &(u, v, _) in &canon {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let mut slots: Vec<(NodeId, u32)> = vec![(0, 0); offsets[n]];
        for &(u, v, i) in &canon {
            let ty = self.edges[i].2.unwrap_or(untyped);
            slots[fill[u as usize]] = (v, ty);
            fill[u as usize] += 1;
            slots[fill[v as usize]] = (u, ty);
            fill[v as usize] += 1;
        }
        for v in 0..n {
            slots[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        let targets: Vec<NodeId> = slots.iter().map(|s| s.0).collect();
        let edge_types = typed.then(|| slots.iter().map(|s| s.1).collect());

        let mut raw = vec![f64::NAN; n * dim];
        for (v, vals) in self.numeric.iter().enumerate() {
            if let Some(vals) = vals {
                raw[v * dim..(v + 1) * dim].copy_from_slice(vals);
            }
        }
        let norm_table = match self.norm_override {
            Some(t) => t,
            None => (0..dim)
                .map(|d| {
                    let mut lo = f64::INFINITY;
                    let mut hi = f64::NEG_INFINITY;
                    for v in 0..n {
                        let x = raw[v * dim + d];
                        if !x.is_nan() {
                            lo = lo.min(x);
                            hi = hi.max(x);
                        }
                    }
                    if lo > hi {
                        (0.0, 0.0)
                    } else {
                        (lo, hi)
                    }
                })
                .collect(),
        };
        let normalized = raw
            .iter()
            .enumerate()
            .map(|(i, &x)| normalize_numeric(x, norm_table[i % dim.max(1)]))
            .collect();

        let mut type_labels = self.type_labels;
        let node_types = if self.node_types.iter().any(Option::is_some) {
            let untyped = if self.node_types.iter().any(Option::is_none) {
                intern(&mut type_labels, "")
            } else {
                0
            };
            Some(
                self.node_types
                    .iter()
                    .map(|t| t.unwrap_or(untyped))
                    .collect(),
            )
        } else {
            None
        };

        let graph = AttributedGraph {
            offsets,
            targets,
            edge_types,
            node_types,
            tokens: self.tokens,
            raw,
            normalized,
            dim,
            norm_table,
            names: self.names,
            index: self.index,
            type_labels,
            edge_type_labels,
            token_labels: self.token_labels,
        };
        Ok((
            graph,
            BuildStats {
                duplicate_edges,
                self_loops: self.self_loops,
            },
        ))
    }
}

fn intern(labels: &mut Vec<String>, label: &str) -> u32 {
    match labels.iter().position(|l| l == label) {
        Some(p) => p as u32,
        None => {
            labels.push(label.to_string());
            (labels.len() - 1) as u32
        }
    }
}
