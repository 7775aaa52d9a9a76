//! Exact branch-and-bound search for the minimum-distance community.
//!
//! States are connected k-cores (or k-trusses) containing q, reached from the
//! maximal one by deleting a node and letting the structure cascade. The
//! search is a depth-first walk over an explicit stack; every frame keeps the
//! [`Deletion`] that produced it so going back up is an undo, not a copy.
//!
//! Three independent pruning rules can be switched on through [`PruneMask`]:
//!
//! * `P1` drops a state reached by a deletion whose most distant removed node
//!   comes before the node that produced the parent in deletion order, since
//!   that state is reachable along a canonical path elsewhere.
//! * `P2` never deletes a node closer to q than the current state's average.
//! * `P3` stops descending once the mean of the closest possible members can
//!   no longer beat the best community found so far.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extensions::SizeBounds;
use crate::graph::{
    maximal_connected_kcore, maximal_connected_ktruss, precedes, AttributedGraph, Deletion, Model,
    NodeId, Structure, Subgraph,
};
use crate::metrics::{stable_sum, DistanceCache, DistanceParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PruneMask {
    pub duplicate: bool,
    pub unnecessary: bool,
    pub unpromising: bool,
}

impl PruneMask {
    pub const ALL: PruneMask = PruneMask {
        duplicate: true,
        unnecessary: true,
        unpromising: true,
    };
    pub const NONE: PruneMask = PruneMask {
        duplicate: false,
        unnecessary: false,
        unpromising: false,
    };
}

impl Default for PruneMask {
    fn default() -> Self {
        PruneMask::ALL
    }
}

impl FromStr for PruneMask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut mask = PruneMask::NONE;
        let s = s.trim();
        if s.is_empty() || s.eq_ignore_ascii_case("none") {
            return Ok(mask);
        }
        for part in s.split(',') {
            match part.trim().to_ascii_uppercase().as_str() {
                "P1" => mask.duplicate = true,
                "P2" => mask.unnecessary = true,
                "P3" => mask.unpromising = true,
                other => return Err(Error::Config(format!("unknown pruning rule {other:?}"))),
            }
        }
        Ok(mask)
    }
}

impl fmt::Display for PruneMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = [
            (self.duplicate, "P1"),
            (self.unnecessary, "P2"),
            (self.unpromising, "P3"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, name)| *name)
        .collect();
        if parts.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Budget {
    pub max_states: Option<u64>,
    pub time_limit: Option<Duration>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationStats {
    /// States entered and evaluated, the root included.
    pub explored: u64,
    pub pruned_duplicate: u64,
    pub pruned_unnecessary: u64,
    pub pruned_unpromising: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Community {
    /// Sorted node ids, query included.
    pub members: Vec<NodeId>,
    pub delta: f64,
}

impl Community {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Preference order between communities: smaller distance, then more
    /// members, then the lexicographically smaller member list.
    pub fn is_better_than(&self, other: &Community) -> bool {
        prefer(self.delta, &self.members, other.delta, &other.members)
    }
}

pub(crate) fn prefer(da: f64, a: &[NodeId], db: f64, b: &[NodeId]) -> bool {
    if da != db {
        return da < db;
    }
    if a.len() != b.len() {
        return a.len() > b.len();
    }
    a < b
}

#[derive(Debug, Clone)]
pub struct ExactOptions {
    pub structure: Structure,
    pub prune: PruneMask,
    pub budget: Budget,
    pub bounds: Option<SizeBounds>,
}

impl ExactOptions {
    pub fn new(structure: Structure) -> Self {
        ExactOptions {
            structure,
            prune: PruneMask::ALL,
            budget: Budget::default(),
            bounds: None,
        }
    }

    pub fn with_prune(mut self, prune: PruneMask) -> Self {
        self.prune = prune;
        self
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_bounds(mut self, bounds: SizeBounds) -> Self {
        self.bounds = Some(bounds);
        self
    }
}

#[derive(Debug, Clone)]
pub struct ExactOutcome {
    pub community: Option<Community>,
    /// Why `community` is empty.
    pub reason: Option<String>,
    pub stats: EnumerationStats,
    pub budget_exhausted: bool,
    pub elapsed: Duration,
}

/// Mean of the `count` smallest distances among the non-query members of
/// `state`, or +inf when the state has no more than `count` such members and
/// so cannot contain a smaller valid state.
pub fn lower_bound(state: &Subgraph, q: u32, count: usize, dist: &[f64]) -> f64 {
    if count == 0 {
        return 0.0;
    }
    let mut values: Vec<f64> = state
        .local_members()
        .filter(|&v| v != q)
        .map(|v| dist[v as usize])
        .collect();
    if values.len() <= count {
        return f64::INFINITY;
    }
    values.select_nth_unstable_by(count - 1, f64::total_cmp);
    let smallest = &mut values[..count];
    smallest.sort_unstable_by(f64::total_cmp);
    stable_sum(smallest.iter().copied()) / count as f64
}

/// `v_m` is the most distant node removed by a deletion, `prev` the node whose
/// deletion produced the parent state (none at the root). Both are
/// `(distance, id)`; prunes when `v_m` strictly precedes `prev` in the order
/// distance descending, id ascending.
pub fn should_prune_duplicate(v_m: (f64, NodeId), prev: Option<(f64, NodeId)>) -> bool {
    match prev {
        None => false,
        Some((pd, pid)) => v_m.0 > pd || (v_m.0 == pd && v_m.1 < pid),
    }
}

pub fn should_prune_unpromising(lb: f64, delta_star: f64) -> bool {
    lb >= delta_star
}

struct Frame {
    candidates: Vec<u32>,
    next: usize,
    prev: Option<u32>,
    undo: Option<Deletion>,
}

pub fn exact_search(
    graph: &AttributedGraph,
    params: DistanceParams,
    options: &ExactOptions,
) -> Result<ExactOutcome> {
    let start = Instant::now();
    let structure = options.structure;
    structure.validate()?;
    if let Some(b) = options.bounds {
        b.validate(structure)?;
    }
    let q = params.query;
    let root = match structure.model {
        Model::Core => maximal_connected_kcore(graph, q, structure.k)?,
        Model::Truss => maximal_connected_ktruss(graph, q, structure.k)?,
    };
    let mut outcome = ExactOutcome {
        community: None,
        reason: None,
        stats: EnumerationStats::default(),
        budget_exhausted: false,
        elapsed: Duration::ZERO,
    };
    if root.is_empty() {
        outcome.reason = Some(format!(
            "query node not in any {}",
            structure_name(structure)
        ));
        outcome.elapsed = start.elapsed();
        return Ok(outcome);
    }
    if let Some(b) = options.bounds {
        if b.l > root.len() {
            outcome.reason = Some(format!(
                "size bounds infeasible: l = {} exceeds maximal {} size {}",
                b.l,
                structure_name(structure),
                root.len()
            ));
            outcome.elapsed = start.elapsed();
            return Ok(outcome);
        }
    }
    let mut cache = DistanceCache::new(graph, params);
    let dist = cache.distances(root.local().globals());
    let ql = root
        .local()
        .local_of(q)
        .expect("query is in its own structure");

    let mut search = Search {
        state: root,
        q: ql,
        dist: &dist,
        prune: options.prune,
        bounds: options.bounds,
        lb_count: lb_count(structure, options.bounds),
        best: None,
        stats: EnumerationStats::default(),
    };
    outcome.budget_exhausted = search.run(&options.budget, start)?;
    outcome.stats = search.stats;
    outcome.community = search.best;
    if outcome.community.is_none() {
        outcome.reason = Some("no community within size bounds".into());
    }
    outcome.elapsed = start.elapsed();
    Ok(outcome)
}

fn structure_name(s: Structure) -> String {
    match s.model {
        Model::Core => format!("{}-core", s.k),
        Model::Truss => format!("{}-truss", s.k),
    }
}

fn lb_count(structure: Structure, bounds: Option<SizeBounds>) -> usize {
    let base = structure.min_size() - 1;
    match bounds {
        Some(b) => base.max(b.l.saturating_sub(1)),
        None => base,
    }
}

struct Search<'a> {
    state: Subgraph,
    q: u32,
    dist: &'a [f64],
    prune: PruneMask,
    bounds: Option<SizeBounds>,
    lb_count: usize,
    best: Option<Community>,
    stats: EnumerationStats,
}

impl Search<'_> {
    /// Returns true when the budget ran out before the tree was exhausted.
    fn run(&mut self, budget: &Budget, start: Instant) -> Result<bool> {
        let root = self.enter();
        let mut stack = vec![Frame {
            candidates: root,
            next: 0,
            prev: None,
            undo: None,
        }];
        let mut ticks = 0u64;
        while let Some(top) = stack.last_mut() {
            if let Some(max) = budget.max_states {
                if self.stats.explored >= max && top.next < top.candidates.len() {
                    return Ok(true);
                }
            }
            ticks += 1;
            if ticks.is_multiple_of(256) {
                if let Some(limit) = budget.time_limit {
                    if start.elapsed() >= limit {
                        return Ok(true);
                    }
                }
            }
            if top.next == top.candidates.len() {
                let frame = stack.pop().expect("non-empty stack");
                if let Some(d) = frame.undo {
                    self.state.undo(d);
                }
                continue;
            }
            let u = top.candidates[top.next];
            top.next += 1;
            let prev = top.prev;

            let d = self.state.delete_and_maintain(u, self.q, self.dist)?;
            if d.query_lost() {
                self.state.undo(d);
                continue;
            }
            if self.prune.duplicate {
                let vm = d.v_m().expect("a deletion removes at least one node");
                let key = |v: u32| (self.dist[v as usize], v);
                if should_prune_duplicate(key(vm), prev.map(key)) {
                    self.stats.pruned_duplicate += 1;
                    self.state.undo(d);
                    continue;
                }
            }
            let candidates = self.enter();
            if candidates.is_empty() {
                self.state.undo(d);
            } else {
                stack.push(Frame {
                    candidates,
                    next: 0,
                    prev: Some(u),
                    undo: Some(d),
                });
            }
        }
        Ok(false)
    }

    /// Evaluates the current state and returns the nodes to branch on, in
    /// deletion order.
    fn enter(&mut self) -> Vec<u32> {
        self.stats.explored += 1;
        let size = self.state.len();
        let delta = self.delta();
        let in_range = self.bounds.is_none_or(|b| b.contains(size));
        if in_range {
            let better = match &self.best {
                None => true,
                Some(best) if delta != best.delta => delta < best.delta,
                Some(best) => prefer(delta, &self.state.members(), best.delta, &best.members),
            };
            if better {
                self.best = Some(Community {
                    members: self.state.members(),
                    delta,
                });
            }
        }
        if self.bounds.is_some_and(|b| size <= b.l) {
            // Every proper substate is smaller than l.
            return Vec::new();
        }
        if self.prune.unpromising {
            let delta_star = self.best.as_ref().map_or(f64::INFINITY, |b| b.delta);
            let lb = lower_bound(&self.state, self.q, self.lb_count, self.dist);
            if should_prune_unpromising(lb, delta_star) {
                self.stats.pruned_unpromising += 1;
                return Vec::new();
            }
        }
        let restrict = self.prune.unnecessary && self.bounds.is_none_or(|b| size <= b.h);
        let mut candidates = Vec::with_capacity(size);
        for v in self.state.local_members() {
            if v == self.q {
                continue;
            }
            if restrict && self.dist[v as usize] <= delta {
                self.stats.pruned_unnecessary += 1;
                continue;
            }
            candidates.push(v);
        }
        let dist = self.dist;
        candidates.sort_unstable_by(|&a, &b| {
            if precedes(dist, a, b) {
                std::cmp::Ordering::Less
            } else if a == b {
                std::cmp::Ordering::Equal
            } else {
                std::cmp::Ordering::Greater
            }
        });
        candidates
    }

    fn delta(&self) -> f64 {
        let sum = stable_sum(
            self.state
                .local_members()
                .filter(|&v| v != self.q)
                .map(|v| self.dist[v as usize]),
        );
        sum / (self.state.len() - 1) as f64
    }
}
