use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimator::{sea_search_with, SeaParams, SeaResult, Topology};
use crate::graph::{AttributedGraph, GraphBuilder, NodeId};

const MAX_LEN: usize = 8;

/// A symmetric meta-path `T0-e0-T1-e1-...-T0`; `*` as an edge type matches
/// any edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaPath {
    node_types: Vec<String>,
    edge_types: Vec<Option<String>>,
}

impl MetaPath {
    pub fn new(node_types: Vec<String>, edge_types: Vec<Option<String>>) -> Result<Self> {
        let len = edge_types.len();
        if node_types.len() != len + 1 {
            return Err(Error::Config(
                "meta-path needs one more node type than edge types".into(),
            ));
        }
        if len < 2 {
            return Err(Error::Config(
                "meta-path must have at least two edges".into(),
            ));
        }
        if len > MAX_LEN {
            return Err(Error::Config(format!(
                "meta-path of length {len} exceeds the maximum of {MAX_LEN}"
            )));
        }
        if node_types.iter().any(|t| t.is_empty() || t == "*") {
            return Err(Error::Config(
                "meta-path node types must be concrete labels".into(),
            ));
        }
        let sym_nodes = node_types.iter().eq(node_types.iter().rev());
        let sym_edges = edge_types.iter().eq(edge_types.iter().rev());
        if !sym_nodes || !sym_edges {
            return Err(Error::Config(
                "meta-path must read the same in both directions".into(),
            ));
        }
        Ok(MetaPath {
            node_types,
            edge_types,
        })
    }

    pub fn target_type(&self) -> &str {
        &self.node_types[0]
    }

    pub fn len(&self) -> usize {
        self.edge_types.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn resolve(&self, graph: &AttributedGraph) -> Option<Resolved> {
        let types = self
            .node_types
            .iter()
            .map(|t| graph.node_type_id(t))
            .collect::<Option<Vec<u32>>>()?;
        let edges = self
            .edge_types
            .iter()
            .map(|e| match e {
                None => Some(None),
                Some(label) => graph.edge_type_id(label).map(Some),
            })
            .collect::<Option<Vec<Option<u32>>>>()?;
        Some(Resolved { types, edges })
    }
}

impl FromStr for MetaPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('-').map(str::trim).collect();
        if parts.len() < 5 || parts.len().is_multiple_of(2) {
            return Err(Error::Config(format!(
                "malformed meta-path {s:?}, expected T0-e0-T1-...-T0"
            )));
        }
        let node_types = parts.iter().step_by(2).map(|t| t.to_string()).collect();
        let edge_types = parts
            .iter()
            .skip(1)
            .step_by(2)
            .map(|e| (*e != "*").then(|| e.to_string()))
            .collect();
        MetaPath::new(node_types, edge_types)
    }
}

impl fmt::Display for MetaPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.node_types[0])?;
        for (e, t) in self.edge_types.iter().zip(&self.node_types[1..]) {
            write!(f, "-{}-{t}", e.as_deref().unwrap_or("*"))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Resolved {
    types: Vec<u32>,
    edges: Vec<Option<u32>>,
}

impl Resolved {
    fn expand(&self, graph: &AttributedGraph, v: NodeId) -> Vec<NodeId> {
        let mut layer = vec![v];
        for (step, &want_edge) in self.edges.iter().enumerate() {
            let want_type = self.types[step + 1];
            let mut next = Vec::new();
            for &x in &layer {
                let nbrs = graph.neighbors(x);
                let etypes = graph.neighbor_edge_types(x);
                for (i, &w) in nbrs.iter().enumerate() {
                    if graph.node_type(w) != Some(want_type) {
                        continue;
                    }
                    let edge_ok = match want_edge {
                        None => true,
                        Some(et) => etypes.is_some_and(|t| t[i] == et),
                    };
                    if edge_ok {
                        next.push(w);
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            if next.is_empty() {
                return next;
            }
            layer = next;
        }
        layer.retain(|&u| u != v);
        layer
    }
}

fn check_target(graph: &AttributedGraph, v: NodeId, path: &MetaPath) -> Result<()> {
    if (v as usize) >= graph.node_count() {
        return Err(Error::NodeNotFound(v.to_string()));
    }
    let ty = graph.node_type(v).map(|t| graph.node_type_label(t));
    if ty != Some(path.target_type()) {
        return Err(Error::Config(format!(
            "node {} is not of the meta-path target type {}",
            graph.name(v),
            path.target_type()
        )));
    }
    Ok(())
}

/// Target nodes reachable from `v` along an instance of `path`, sorted, `v`
/// excluded.
pub fn p_neighbors(graph: &AttributedGraph, v: NodeId, path: &MetaPath) -> Result<Vec<NodeId>> {
    check_target(graph, v, path)?;
    Ok(path
        .resolve(graph)
        .map_or_else(Vec::new, |r| r.expand(graph, v)))
}

/// Target nodes linked by meta-path instances, expanded on demand and
/// memoized per query.
pub struct MetaPathTopology<'g> {
    graph: &'g AttributedGraph,
    path: MetaPath,
    resolved: Option<Resolved>,
    memo: HashMap<NodeId, Vec<NodeId>>,
    population: usize,
}

impl<'g> MetaPathTopology<'g> {
    pub fn new(graph: &'g AttributedGraph, path: MetaPath) -> Self {
        let resolved = path.resolve(graph);
        let population = graph
            .node_type_id(path.target_type())
            .map_or(0, |t| graph.count_of_type(t));
        MetaPathTopology {
            graph,
            path,
            resolved,
            memo: HashMap::new(),
            population,
        }
    }
}

impl Topology for MetaPathTopology<'_> {
    fn population(&self) -> usize {
        self.population
    }

    fn check_query(&self, q: NodeId) -> Result<()> {
        check_target(self.graph, q, &self.path)
    }

    fn neighbors(&mut self, v: NodeId, out: &mut Vec<NodeId>) {
        let Some(resolved) = &self.resolved else {
            return;
        };
        let graph = self.graph;
        let list = self
            .memo
            .entry(v)
            .or_insert_with(|| resolved.expand(graph, v));
        out.extend_from_slice(list);
    }
}

/// Sampling search where structure is counted in meta-path neighbors among
/// target nodes.
pub fn sea_search_hetero(
    graph: &AttributedGraph,
    q: NodeId,
    path: &MetaPath,
    params: &SeaParams,
) -> Result<SeaResult> {
    if !graph.is_heterogeneous() {
        return Err(Error::Config("meta-path search needs node types".into()));
    }
    let mut topology = MetaPathTopology::new(graph, path.clone());
    sea_search_with(graph, &mut topology, q, params)
}

/// An explicitly materialized meta-path projection.
#[derive(Debug, Clone)]
pub struct Projection {
    pub graph: AttributedGraph,
    /// `parent[i]` is the id in the heterogeneous graph of projected node `i`.
    pub parent: Vec<NodeId>,
}

impl Projection {
    pub fn local_id(&self, parent_id: NodeId) -> Option<NodeId> {
        self.parent
            .binary_search(&parent_id)
            .ok()
            .map(|i| i as NodeId)
    }
}

/// Builds the homogeneous graph over target nodes whose edges are P-neighbor
/// pairs. Node order and attribute normalization follow the parent graph, so
/// distances and tie-breaks carry over unchanged.
pub fn project_metapath(graph: &AttributedGraph, path: &MetaPath) -> Result<Projection> {
    let target = graph
        .node_type_id(path.target_type())
        .ok_or_else(|| Error::Config(format!("no node of type {}", path.target_type())))?;
    let parent: Vec<NodeId> = (0..graph.node_count() as NodeId)
        .filter(|&v| graph.node_type(v) == Some(target))
        .collect();
    let mut builder = GraphBuilder::new().with_norm_table(graph.norm_table().to_vec());
    for &v in &parent {
        builder.node(graph.name(v));
    }
    for &v in &parent {
        let tokens: Vec<&str> = graph
            .tokens(v)
            .iter()
            .map(|&t| graph.token_label(t))
            .collect();
        builder.attributes(graph.name(v), tokens, graph.raw_numeric(v))?;
    }
    let resolved = path.resolve(graph);
    for &v in &parent {
        if let Some(r) = &resolved {
            for u in r.expand(graph, v) {
                if v < u {
                    builder.edge(graph.name(v), graph.name(u));
                }
            }
        }
    }
    let (projected, _) = builder.build()?;
    Ok(Projection {
        graph: projected,
        parent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bib() -> AttributedGraph {
        let mut b = GraphBuilder::new();
        for (a, p) in [
            ("a1", "p1"),
            ("a2", "p1"),
            ("a2", "p2"),
            ("a3", "p2"),
            ("a4", "p3"),
        ] {
            b.typed_edge(a, p, "writes");
        }
        b.typed_edge("p1", "v1", "at");
        b.typed_edge("p3", "v1", "at");
        for a in ["a1", "a2", "a3", "a4"] {
            b.node_type(a, "A");
        }
        for p in ["p1", "p2", "p3"] {
            b.node_type(p, "P");
        }
        b.node_type("v1", "V");
        b.build().unwrap().0
    }

    #[test]
    fn parse_and_display() {
        let p: MetaPath = "A-writes-P-writes-A".parse().unwrap();
        assert_eq!(p.to_string(), "A-writes-P-writes-A");
        assert_eq!(p.len(), 2);
        assert!("A-writes-P".parse::<MetaPath>().is_err());
        assert!("A-writes-P-at-A".parse::<MetaPath>().is_err());
        assert!("A-*-P-*-V-*-P-*-A".parse::<MetaPath>().is_ok());
        let long = ["A-*-P"; 5].join("-*-") + "-*-P-*-A";
        assert!(long.parse::<MetaPath>().is_err());
    }

    #[test]
    fn coauthors() {
        let g = bib();
        let apa: MetaPath = "A-writes-P-writes-A".parse().unwrap();
        let id = |n| g.id(n).unwrap();
        assert_eq!(p_neighbors(&g, id("a1"), &apa).unwrap(), vec![id("a2")]);
        let mut a2 = p_neighbors(&g, id("a2"), &apa).unwrap();
        a2.sort();
        assert_eq!(a2, {
            let mut v = vec![id("a1"), id("a3")];
            v.sort();
            v
        });
        assert!(p_neighbors(&g, id("p1"), &apa).is_err());
    }

    #[test]
    fn venue_path_and_missing_type() {
        let g = bib();
        let apvpa: MetaPath = "A-*-P-at-V-at-P-*-A".parse().unwrap();
        let id = |n| g.id(n).unwrap();
        assert_eq!(p_neighbors(&g, id("a1"), &apvpa).unwrap(), {
            let mut v = vec![id("a2"), id("a4")];
            v.sort();
            v
        });
        let absent: MetaPath = "A-*-X-*-A".parse().unwrap();
        assert!(p_neighbors(&g, id("a1"), &absent).unwrap().is_empty());
    }

    #[test]
    fn projection_edges() {
        let g = bib();
        let apa: MetaPath = "A-writes-P-writes-A".parse().unwrap();
        let proj = project_metapath(&g, &apa).unwrap();
        assert_eq!(proj.graph.node_count(), 4);
        assert_eq!(proj.graph.edge_count(), 2);
    }
}
