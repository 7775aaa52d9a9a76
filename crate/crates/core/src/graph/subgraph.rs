//! Induced subgraphs with live k-core / k-truss bookkeeping.
//!
//! A [`Subgraph`] works over a [`LocalGraph`], a compact re-indexing of a node
//! set of the parent graph. Deletions cascade until the structural threshold
//! holds again, then the state is cut down to the query's component. Every
//! deletion returns a [`Deletion`] log that [`Subgraph::undo`] reverts exactly,
//! so a depth-first search can walk states without copying them.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{core_decomposition, Adjacency, AttributedGraph, NodeId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    #[default]
    Core,
    Truss,
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Model::Core => "core",
            Model::Truss => "truss",
        })
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core" => Ok(Model::Core),
            "truss" => Ok(Model::Truss),
            other => Err(Error::Config(format!("unknown model {other:?}"))),
        }
    }
}

/// Structural cohesiveness requirement: connected k-core or k-truss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure {
    pub model: Model,
    pub k: usize,
}

impl Structure {
    pub fn core(k: usize) -> Self {
        Structure {
            model: Model::Core,
            k,
        }
    }

    pub fn truss(k: usize) -> Self {
        Structure {
            model: Model::Truss,
            k,
        }
    }

    /// Smallest node count of any valid community.
    pub fn min_size(&self) -> usize {
        crate::extensions::model_minimum_size(self.model, self.k)
    }

    pub fn validate(&self) -> Result<()> {
        match self.model {
            Model::Core if self.k < 1 => Err(Error::Config("k-core requires k >= 1".into())),
            Model::Truss if self.k < 2 => Err(Error::Config("k-truss requires k >= 2".into())),
            _ => Ok(()),
        }
    }
}

/// A node set of a parent graph re-indexed to `0..len`, local ids ordered by
/// global id.
#[derive(Debug, Clone, Default)]
pub struct LocalGraph {
    global: Vec<NodeId>,
    offsets: Vec<usize>,
    adj: Vec<u32>,
    slot_edge: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl LocalGraph {
    /// The subgraph of `graph` induced by `nodes`.
    pub fn induced(graph: &AttributedGraph, nodes: &[NodeId]) -> Self {
        Self::from_neighbors(nodes.to_vec(), |v, out| {
            out.extend_from_slice(graph.neighbors(v))
        })
    }

    /// Builds from an arbitrary symmetric neighbor provider; neighbors outside
    /// `nodes` are ignored.
    pub fn from_neighbors(
        mut global: Vec<NodeId>,
        mut neighbors: impl FnMut(NodeId, &mut Vec<NodeId>),
    ) -> Self {
        global.sort_unstable();
        global.dedup();
        let n = global.len();
        let mut pairs = Vec::new();
        let mut buf = Vec::new();
        for (i, &g) in global.iter().enumerate() {
            buf.clear();
            neighbors(g, &mut buf);
            for &w in &buf {
                if let Ok(j) = global.binary_search(&w) {
                    if j != i {
                        pairs.push(((i.min(j)) as u32, (i.max(j)) as u32));
                    }
                }
            }
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut degree = vec![0usize; n];
        for &(a, b) in &pairs {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets[..n].to_vec();
        let mut slots = vec![(0u32, 0u32); offsets[n]];
        for (e, &(a, b)) in pairs.iter().enumerate() {
            slots[fill[a as usize]] = (b, e as u32);
            fill[a as usize] += 1;
            slots[fill[b as usize]] = (a, e as u32);
            fill[b as usize] += 1;
        }
        for v in 0..n {
            slots[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        LocalGraph {
            global,
            offsets,
            adj: slots.iter().map(|s| s.0).collect(),
            slot_edge: slots.iter().map(|s| s.1).collect(),
            edges: pairs,
        }
    }

    pub fn len(&self) -> usize {
        self.global.len()
    }

    pub fn is_empty(&self) -> bool {
        self.global.is_empty()
    }

    pub fn global(&self, v: u32) -> NodeId {
        self.global[v as usize]
    }

    pub fn globals(&self) -> &[NodeId] {
        &self.global
    }

    pub fn local_of(&self, g: NodeId) -> Option<u32> {
        self.global.binary_search(&g).ok().map(|i| i as u32)
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    fn edge_ids(&self, v: u32) -> &[u32] {
        &self.slot_edge[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: u32) -> (u32, u32) {
        self.edges[e as usize]
    }

    /// Calls `f(x, edge(a,x), edge(b,x))` for every common neighbor `x`.
    fn for_each_triangle(&self, a: u32, b: u32, mut f: impl FnMut(u32, u32, u32)) {
        let (na, ea) = (self.neighbors(a), self.edge_ids(a));
        let (nb, eb) = (self.neighbors(b), self.edge_ids(b));
        let (mut i, mut j) = (0, 0);
        while i < na.len() && j < nb.len() {
            match na[i].cmp(&nb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    f(na[i], ea[i], eb[j]);
                    i += 1;
                    j += 1;
                }
            }
        }
    }
}

impl Adjacency for LocalGraph {
    fn node_count(&self) -> usize {
        self.len()
    }

    fn neighbors(&self, v: u32) -> &[u32] {
        LocalGraph::neighbors(self, v)
    }
}

#[derive(Debug, Clone, Copy)]
enum Event {
    Node(u32),
    Edge(u32),
}

/// Undo record of one [`Subgraph::delete_and_maintain`] call.
#[derive(Debug, Default)]
pub struct Deletion {
    log: Vec<Event>,
    removed: Vec<u32>,
    v_m: Option<u32>,
    query_lost: bool,
}

impl Deletion {
    /// Local ids of every node removed, in removal order.
    pub fn removed(&self) -> &[u32] {
        &self.removed
    }

    /// The removed node with the largest distance (ties: smaller id).
    pub fn v_m(&self) -> Option<u32> {
        self.v_m
    }

    pub fn query_lost(&self) -> bool {
        self.query_lost
    }
}

#[derive(Debug, Clone)]
pub struct Subgraph {
    local: Arc<LocalGraph>,
    structure: Structure,
    alive: Vec<bool>,
    // Alive neighbors (core) or alive incident edges (truss), kept for every
    // node, dead or alive.
    degree: Vec<u32>,
    edge_alive: Vec<bool>,
    support: Vec<u32>,
    doomed: Vec<bool>,
    len: usize,
}

impl Subgraph {
    /// All nodes and edges of `local`, structure not yet enforced.
    pub fn induced(local: Arc<LocalGraph>, structure: Structure) -> Self {
        let n = local.len();
        let degree = (0..n as u32)
            .map(|v| local.neighbors(v).len() as u32)
            .collect();
        let (edge_alive, support, doomed) = match structure.model {
            Model::Core => (Vec::new(), Vec::new(), Vec::new()),
            Model::Truss => {
                let m = local.edge_count();
                let support = (0..m as u32)
                    .map(|e| {
                        let (a, b) = local.edge(e);
                        let mut c = 0;
                        local.for_each_triangle(a, b, |_, _, _| c += 1);
                        c
                    })
                    .collect();
                (vec![true; m], support, vec![false; m])
            }
        };
        Subgraph {
            alive: vec![true; n],
            len: n,
            local,
            structure,
            degree,
            edge_alive,
            support,
            doomed,
        }
    }

    pub fn empty(structure: Structure) -> Self {
        Self::induced(Arc::new(LocalGraph::default()), structure)
    }

    /// The maximal connected structure around global node `q` inside `local`;
    /// empty when `q` is absent or not part of any such structure.
    pub fn maximal(local: Arc<LocalGraph>, q: NodeId, structure: Structure) -> Self {
        let mut state = Self::induced(local, structure);
        match state.local.local_of(q) {
            Some(ql) => {
                state.establish(ql);
            }
            None => state.clear(),
        }
        state
    }

    pub fn local(&self) -> &LocalGraph {
        &self.local
    }

    pub fn local_arc(&self) -> &Arc<LocalGraph> {
        &self.local
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_alive(&self, v: u32) -> bool {
        self.alive[v as usize]
    }

    pub fn contains(&self, g: NodeId) -> bool {
        self.local
            .local_of(g)
            .is_some_and(|v| self.alive[v as usize])
    }

    /// Degree of `v` counted in alive neighbors (core) or alive edges (truss).
    pub fn live_degree(&self, v: u32) -> u32 {
        self.degree[v as usize]
    }

    pub fn local_members(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.alive.len() as u32).filter(|&v| self.alive[v as usize])
    }

    /// Global ids of the members, ascending.
    pub fn members(&self) -> Vec<NodeId> {
        self.local_members().map(|v| self.local.global(v)).collect()
    }

    /// Alive edges as global id pairs. For the core model these are all edges
    /// between members.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        (0..self.local.edge_count() as u32)
            .filter(|&e| self.edge_is_alive(e))
            .map(|e| {
                let (a, b) = self.local.edge(e);
                (self.local.global(a), self.local.global(b))
            })
            .collect()
    }

    fn edge_is_alive(&self, e: u32) -> bool {
        match self.structure.model {
            Model::Core => {
                let (a, b) = self.local.edge(e);
                self.alive[a as usize] && self.alive[b as usize]
            }
            Model::Truss => self.edge_alive[e as usize],
        }
    }

    /// Enforces the structure and keeps only `q`'s component. Returns false
    /// (and empties the state) when `q` does not survive.
    pub fn establish(&mut self, q: u32) -> bool {
        let mut log = Vec::new();
        let mut removed = Vec::new();
        match self.structure.model {
            Model::Core => {
                let k = self.structure.k as u32;
                let stack: Vec<u32> = self
                    .local_members()
                    .filter(|&v| self.degree[v as usize] < k)
                    .collect();
                self.cascade_core(stack, &mut log, &mut removed);
            }
            Model::Truss => {
                let thr = self.truss_threshold();
                let mut stack = Vec::new();
                for e in 0..self.edge_alive.len() {
                    if self.edge_alive[e] && self.support[e] < thr {
                        self.doomed[e] = true;
                        stack.push(e as u32);
                    }
                }
                self.cascade_truss(stack, &mut log, &mut removed);
                let isolated: Vec<u32> = self
                    .local_members()
                    .filter(|&v| self.degree[v as usize] == 0)
                    .collect();
                for v in isolated {
                    self.kill_truss_node(v, &mut log, &mut removed);
                }
            }
        }
        if self.alive[q as usize] {
            self.restrict_to_component(q, &mut log, &mut removed);
            true
        } else {
            self.clear();
            false
        }
    }

    fn clear(&mut self) {
        self.alive.iter_mut().for_each(|a| *a = false);
        self.edge_alive.iter_mut().for_each(|a| *a = false);
        self.len = 0;
    }

    fn truss_threshold(&self) -> u32 {
        self.structure.k.saturating_sub(2) as u32
    }

    /// Removes `v`, cascades, and restricts to `q`'s component. `dist` holds
    /// f(·,q) per local id and only decides `v_m`.
    pub fn delete_and_maintain(&mut self, v: u32, q: u32, dist: &[f64]) -> Result<Deletion> {
        if v == q {
            return Err(Error::Contract("cannot delete the query node".into()));
        }
        if (v as usize) >= self.alive.len() || !self.alive[v as usize] {
            return Err(Error::Contract(format!(
                "node {v} is not a member of the state"
            )));
        }
        let mut d = Deletion::default();
        match self.structure.model {
            Model::Core => {
                let k = self.structure.k as u32;
                let mut stack = Vec::new();
                self.kill_core_node(v, &mut d.log, &mut d.removed, |w, deg| {
                    if deg + 1 == k {
                        stack.push(w);
                    }
                });
                self.cascade_core(stack, &mut d.log, &mut d.removed);
            }
            Model::Truss => {
                self.alive[v as usize] = false;
                self.len -= 1;
                d.log.push(Event::Node(v));
                d.removed.push(v);
                let stack = self.doom_incident(v);
                self.cascade_truss(stack, &mut d.log, &mut d.removed);
            }
        }
        if self.alive[q as usize] {
            self.restrict_to_component(q, &mut d.log, &mut d.removed);
        } else {
            d.query_lost = true;
            self.drop_unreached(&[], &mut d.log, &mut d.removed);
        }
        d.v_m = d.removed.iter().copied().reduce(
            |best, x| {
                if precedes(dist, x, best) {
                    x
                } else {
                    best
                }
            },
        );
        Ok(d)
    }

    /// Reverts a deletion. Deletions must be undone in LIFO order.
    pub fn undo(&mut self, d: Deletion) {
        for ev in d.log.into_iter().rev() {
            match ev {
                Event::Node(x) => {
                    self.alive[x as usize] = true;
                    self.len += 1;
                    if self.structure.model == Model::Core {
                        for &w in self.local.neighbors(x) {
                            self.degree[w as usize] += 1;
                        }
                    }
                }
                Event::Edge(e) => {
                    let (a, b) = self.local.edge(e);
                    self.edge_alive[e as usize] = true;
                    let (alive, support) = (&self.edge_alive, &mut self.support);
                    self.local.for_each_triangle(a, b, |_, ea, eb| {
                        if alive[ea as usize] && alive[eb as usize] {
                            support[ea as usize] += 1;
                            support[eb as usize] += 1;
                        }
                    });
                    self.degree[a as usize] += 1;
                    self.degree[b as usize] += 1;
                }
            }
        }
    }

    fn kill_core_node(
        &mut self,
        x: u32,
        log: &mut Vec<Event>,
        removed: &mut Vec<u32>,
        mut on_decrement: impl FnMut(u32, u32),
    ) {
        self.alive[x as usize] = false;
        self.len -= 1;
        log.push(Event::Node(x));
        removed.push(x);
        for &w in self.local.neighbors(x) {
            self.degree[w as usize] -= 1;
            if self.alive[w as usize] {
                on_decrement(w, self.degree[w as usize]);
            }
        }
    }

    fn cascade_core(&mut self, mut stack: Vec<u32>, log: &mut Vec<Event>, removed: &mut Vec<u32>) {
        let k = self.structure.k as u32;
        while let Some(x) = stack.pop() {
            if !self.alive[x as usize] {
                continue;
            }
            // A node is queued once: when its degree drops from k to k-1.
            self.kill_core_node(x, log, removed, |w, deg| {
                if deg + 1 == k {
                    stack.push(w);
                }
            });
        }
    }

    fn doom_incident(&mut self, v: u32) -> Vec<u32> {
        let mut stack = Vec::new();
        for &e in self.local.edge_ids(v) {
            if self.edge_alive[e as usize] && !self.doomed[e as usize] {
                self.doomed[e as usize] = true;
                stack.push(e);
            }
        }
        stack
    }

    /// Processes doomed edges one at a time; an edge counts as alive for
    /// triangle bookkeeping until it is processed.
    fn cascade_truss(&mut self, mut stack: Vec<u32>, log: &mut Vec<Event>, removed: &mut Vec<u32>) {
        let thr = self.truss_threshold();
        while let Some(e) = stack.pop() {
            self.drop_edge(e, log, removed, |this, f| {
                if this.support[f as usize] < thr && !this.doomed[f as usize] {
                    this.doomed[f as usize] = true;
                    stack.push(f);
                }
            });
        }
    }

    fn drop_edge(
        &mut self,
        e: u32,
        log: &mut Vec<Event>,
        removed: &mut Vec<u32>,
        mut on_support_drop: impl FnMut(&mut Self, u32),
    ) {
        let (a, b) = self.local.edge(e);
        let local = Arc::clone(&self.local);
        local.for_each_triangle(a, b, |_, ea, eb| {
            if self.edge_alive[ea as usize] && self.edge_alive[eb as usize] {
                self.support[ea as usize] -= 1;
                self.support[eb as usize] -= 1;
                on_support_drop(self, ea);
                on_support_drop(self, eb);
            }
        });
        self.edge_alive[e as usize] = false;
        self.doomed[e as usize] = false;
        log.push(Event::Edge(e));
        for y in [a, b] {
            self.degree[y as usize] -= 1;
            if self.alive[y as usize] && self.degree[y as usize] == 0 {
                self.alive[y as usize] = false;
                self.len -= 1;
                log.push(Event::Node(y));
                removed.push(y);
            }
        }
    }

    fn kill_truss_node(&mut self, v: u32, log: &mut Vec<Event>, removed: &mut Vec<u32>) {
        let incident: Vec<u32> = self
            .local
            .edge_ids(v)
            .iter()
            .copied()
            .filter(|&e| self.edge_alive[e as usize])
            .collect();
        for e in incident {
            self.drop_edge(e, log, removed, |_, _| {});
        }
        if self.alive[v as usize] {
            self.alive[v as usize] = false;
            self.len -= 1;
            log.push(Event::Node(v));
            removed.push(v);
        }
    }

    fn restrict_to_component(&mut self, q: u32, log: &mut Vec<Event>, removed: &mut Vec<u32>) {
        let mut reached = vec![q];
        let mut seen = vec![false; self.alive.len()];
        seen[q as usize] = true;
        let mut queue = VecDeque::from([q]);
        while let Some(v) = queue.pop_front() {
            let (nbrs, eids) = (self.local.neighbors(v), self.local.edge_ids(v));
            for (&w, &e) in nbrs.iter().zip(eids) {
                let usable = match self.structure.model {
                    Model::Core => self.alive[w as usize],
                    Model::Truss => self.edge_alive[e as usize],
                };
                if usable && !seen[w as usize] {
                    seen[w as usize] = true;
                    reached.push(w);
                    queue.push_back(w);
                }
            }
        }
        if reached.len() < self.len {
            self.drop_unreached(&seen, log, removed);
        }
    }

    /// Removes every alive node with `reached[v] == false` (all of them when
    /// `reached` is empty). No cascade: these nodes are disconnected from the
    /// part that stays.
    fn drop_unreached(&mut self, reached: &[bool], log: &mut Vec<Event>, removed: &mut Vec<u32>) {
        let doomed: Vec<u32> = self
            .local_members()
            .filter(|&v| reached.is_empty() || !reached[v as usize])
            .collect();
        for v in doomed {
            if !self.alive[v as usize] {
                continue;
            }
            match self.structure.model {
                Model::Core => self.kill_core_node(v, log, removed, |_, _| {}),
                Model::Truss => self.kill_truss_node(v, log, removed),
            }
        }
    }

    /// Recomputes the structural conditions from scratch: connected, contains
    /// `q`, min degree >= k (core) or every alive edge in >= k-2 alive
    /// triangles with no edgeless member (truss).
    pub fn is_valid(&self, q: NodeId) -> bool {
        let Some(ql) = self.local.local_of(q) else {
            return false;
        };
        if !self.alive[ql as usize] {
            return false;
        }
        let edges = self.edges();
        validate_structure(&self.members(), &edges, q, self.structure)
    }
}

/// `a` comes before `b` in deletion priority: larger distance first, then
/// smaller id.
pub(crate) fn precedes(dist: &[f64], a: u32, b: u32) -> bool {
    let (da, db) = (dist[a as usize], dist[b as usize]);
    da > db || (da == db && a < b)
}

/// Checks a node set with an explicit edge set against `structure`.
pub(crate) fn validate_structure(
    members: &[NodeId],
    edges: &[(NodeId, NodeId)],
    q: NodeId,
    structure: Structure,
) -> bool {
    if members.binary_search(&q).is_err() || members.len() < structure.min_size() {
        return false;
    }
    let idx = |g: NodeId| members.binary_search(&g).ok();
    let n = members.len();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        match (idx(a), idx(b)) {
            (Some(i), Some(j)) => {
                adj[i].push(j);
                adj[j].push(i);
            }
            _ => return false,
        }
    }
    for row in adj.iter_mut() {
        row.sort_unstable();
    }
    let ok = match structure.model {
        Model::Core => adj.iter().all(|row| row.len() >= structure.k),
        Model::Truss => {
            let thr = structure.k.saturating_sub(2);
            adj.iter().all(|row| !row.is_empty())
                && edges.iter().all(|&(a, b)| {
                    let (i, j) = (idx(a).unwrap(), idx(b).unwrap());
                    adj[i]
                        .iter()
                        .filter(|x| adj[j].binary_search(x).is_ok())
                        .count()
                        >= thr
                })
        }
    };
    if !ok {
        return false;
    }
    let start = idx(q).unwrap();
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut stack = vec![start];
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

/// Subgraph of `graph` induced by `nodes`, structure not enforced.
pub fn induced_subgraph(
    graph: &AttributedGraph,
    nodes: &[NodeId],
    structure: Structure,
) -> Subgraph {
    Subgraph::induced(Arc::new(LocalGraph::induced(graph, nodes)), structure)
}

fn check_query(graph: &AttributedGraph, q: NodeId) -> Result<()> {
    if (q as usize) < graph.node_count() {
        Ok(())
    } else {
        Err(Error::NodeNotFound(q.to_string()))
    }
}

/// Maximal connected k-core containing `q` (empty when `q` has coreness < k).
pub fn maximal_connected_kcore(graph: &AttributedGraph, q: NodeId, k: usize) -> Result<Subgraph> {
    check_query(graph, q)?;
    let structure = Structure::core(k);
    let coreness = core_decomposition(graph);
    if (coreness[q as usize] as usize) < k {
        return Ok(Subgraph::empty(structure));
    }
    let mut seen = vec![false; graph.node_count()];
    let mut members = vec![q];
    seen[q as usize] = true;
    let mut head = 0;
    while head < members.len() {
        let v = members[head];
        head += 1;
        for &w in graph.neighbors(v) {
            if !seen[w as usize] && coreness[w as usize] as usize >= k {
                seen[w as usize] = true;
                members.push(w);
            }
        }
    }
    let local = Arc::new(LocalGraph::induced(graph, &members));
    Ok(Subgraph::maximal(local, q, structure))
}

/// Maximal connected k-truss containing `q`.
pub fn maximal_connected_ktruss(graph: &AttributedGraph, q: NodeId, k: usize) -> Result<Subgraph> {
    check_query(graph, q)?;
    let structure = Structure::truss(k);
    structure.validate()?;
    let component = graph.component_of(q);
    let local = Arc::new(LocalGraph::induced(graph, &component));
    Ok(Subgraph::maximal(local, q, structure))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn graph(n: u32, edges: &[(u32, u32)]) -> AttributedGraph {
        let mut b = GraphBuilder::new();
        for v in 0..n {
            b.node(&v.to_string());
        }
        for &(u, v) in edges {
            b.edge(&u.to_string(), &v.to_string());
        }
        b.build().unwrap().0
    }

    fn k4() -> AttributedGraph {
        graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    #[test]
    fn k4_is_its_own_four_truss() {
        let g = k4();
        for q in 0..4 {
            let s = maximal_connected_ktruss(&g, q, 4).unwrap();
            assert_eq!(s.members(), vec![0, 1, 2, 3]);
            assert!(s.is_valid(q));
        }
    }

    #[test]
    fn tree_has_no_three_truss() {
        let g = graph(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]);
        assert!(maximal_connected_ktruss(&g, 1, 3).unwrap().is_empty());
    }

    #[test]
    fn low_degree_query_gives_empty_core() {
        let g = graph(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)]);
        assert!(maximal_connected_kcore(&g, 4, 2).unwrap().is_empty());
        assert_eq!(
            maximal_connected_kcore(&g, 0, 2).unwrap().members(),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn unknown_query_is_error() {
        let g = k4();
        assert!(matches!(
            maximal_connected_kcore(&g, 9, 2),
            Err(Error::NodeNotFound(_))
        ));
    }

    #[test]
    fn delete_without_cascade_reports_itself() {
        let g = k4();
        let mut s = maximal_connected_kcore(&g, 0, 2).unwrap();
        let dist = [0.0, 0.4, 0.2, 0.3];
        let d = s.delete_and_maintain(1, 0, &dist).unwrap();
        assert_eq!(d.removed(), &[1]);
        assert_eq!(d.v_m(), Some(1));
        assert_eq!(s.members(), vec![0, 2, 3]);
        s.undo(d);
        assert_eq!(s.members(), vec![0, 1, 2, 3]);
        for v in 0..4 {
            assert_eq!(s.live_degree(v), 3);
        }
    }

    #[test]
    fn deleting_query_is_contract_violation() {
        let g = k4();
        let mut s = maximal_connected_kcore(&g, 0, 2).unwrap();
        assert!(s.delete_and_maintain(0, 0, &[0.0; 4]).is_err());
        let _ = s.delete_and_maintain(1, 0, &[0.0; 4]).unwrap();
        assert!(s.delete_and_maintain(1, 0, &[0.0; 4]).is_err());
    }

    #[test]
    fn cascade_that_removes_query_empties_state() {
        // triangle 0-1-2 plus pendant-free: deleting 1 drops 0 and 2 at k=2
        let g = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let mut s = maximal_connected_kcore(&g, 0, 2).unwrap();
        let d = s.delete_and_maintain(1, 0, &[0.0, 0.5, 0.9]).unwrap();
        assert!(d.query_lost());
        assert!(s.is_empty());
        assert_eq!(d.v_m(), Some(2));
        s.undo(d);
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn truss_delete_and_undo_restores_support() {
        let g = k4();
        let mut s = maximal_connected_ktruss(&g, 0, 3).unwrap();
        let before = s.support.clone();
        let d = s.delete_and_maintain(3, 0, &[0.0, 0.1, 0.2, 0.3]).unwrap();
        assert_eq!(s.members(), vec![0, 1, 2]);
        assert!(s.is_valid(0));
        s.undo(d);
        assert_eq!(s.support, before);
        assert_eq!(s.len(), 4);
    }
}
