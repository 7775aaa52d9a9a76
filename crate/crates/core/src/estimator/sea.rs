use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{accuracy_met, blb_moe, greedy_next_candidate, BlbParams, ConfidenceInterval};
use crate::error::{Error, Result};
use crate::exact::prefer;
use crate::extensions::SizeBounds;
use crate::graph::{AttributedGraph, LocalGraph, Model, NodeId, Structure, Subgraph};
use crate::metrics::{stable_sum, DistanceCache, DistanceParams};
use crate::par::Execution;
use crate::rng;
use crate::sampler::{
    build_neighborhood, incremental_sample_size, min_neighborhood_size, sampling_probabilities,
    HoeffdingParams, SampleState,
};

/// Margin accepted when the best candidate sits at distance zero and no
/// relative threshold exists.
const ZERO_DELTA_MOE: f64 = 1e-9;

/// The graph the sampling search walks on: the plain graph, or target nodes
/// linked by meta-path instances.
pub trait Topology {
    /// Node count used to size the neighborhood.
    fn population(&self) -> usize;

    fn check_query(&self, q: NodeId) -> Result<()>;

    fn neighbors(&mut self, v: NodeId, out: &mut Vec<NodeId>);

    fn local_graph(&mut self, nodes: &[NodeId]) -> LocalGraph {
        LocalGraph::from_neighbors(nodes.to_vec(), |v, out| self.neighbors(v, out))
    }
}

pub struct Homogeneous<'g>(pub &'g AttributedGraph);

impl Topology for Homogeneous<'_> {
    fn population(&self) -> usize {
        self.0.node_count()
    }

    fn check_query(&self, q: NodeId) -> Result<()> {
        if (q as usize) < self.0.node_count() {
            Ok(())
        } else {
            Err(Error::NodeNotFound(q.to_string()))
        }
    }

    fn neighbors(&mut self, v: NodeId, out: &mut Vec<NodeId>) {
        out.extend_from_slice(self.0.neighbors(v));
    }

    fn local_graph(&mut self, nodes: &[NodeId]) -> LocalGraph {
        LocalGraph::induced(self.0, nodes)
    }
}

#[derive(Debug, Clone)]
pub struct SeaParams {
    pub structure: Structure,
    pub gamma: f64,
    /// Target relative error.
    pub e: f64,
    pub hoeffding: HoeffdingParams,
    /// Initial sample fraction of the neighborhood.
    pub lambda: f64,
    pub blb: BlbParams,
    pub seed: u64,
    pub max_rounds: usize,
    pub bounds: Option<SizeBounds>,
    pub execution: Execution,
}

impl SeaParams {
    pub fn new(structure: Structure) -> Self {
        SeaParams {
            structure,
            gamma: 0.5,
            e: 0.02,
            hoeffding: HoeffdingParams {
                epsilon: 0.05,
                beta: 0.05,
            },
            lambda: 0.2,
            blb: BlbParams::default(),
            seed: 0,
            max_rounds: 10,
            bounds: None,
            execution: Execution::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.structure.validate()?;
        DistanceParams::new(self.gamma, 0)?;
        HoeffdingParams::new(self.hoeffding.epsilon, self.hoeffding.beta)?;
        self.blb.validate()?;
        if !(self.e > 0.0 && self.e.is_finite()) {
            return Err(Error::Config(format!("e must be positive, got {}", self.e)));
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::Config(format!(
                "lambda must lie in (0, 1], got {}",
                self.lambda
            )));
        }
        if self.max_rounds == 0 {
            return Err(Error::Config("round cap must be at least 1".into()));
        }
        if let Some(b) = self.bounds {
            b.validate(self.structure)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StageTimings {
    /// Sizing and building the neighborhood.
    pub neighborhood: Duration,
    /// Drawing samples and extracting the maximal structure.
    pub sampling: Duration,
    /// Candidate walk with bootstrap estimation.
    pub estimation: Duration,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub sample_size: usize,
    /// Nodes drawn after this round (0 on the last one).
    pub added: usize,
    pub candidates: usize,
    pub estimated: usize,
    /// Smallest distance among this round's estimated candidates.
    pub delta: Option<f64>,
    pub moe: Option<f64>,
    /// Best distance over all rounds so far.
    pub best_delta: Option<f64>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeaResult {
    /// Sorted node ids; empty when nothing qualified.
    pub community: Vec<NodeId>,
    pub ci: Option<ConfidenceInterval>,
    pub guarantee_met: bool,
    /// Accepted at distance zero, where the relative bound is meaningless.
    pub degenerate: bool,
    pub reason: Option<String>,
    pub structure: Structure,
    pub bounds: Option<SizeBounds>,
    pub population: usize,
    pub neighborhood_target: usize,
    pub neighborhood_size: usize,
    pub rounds: Vec<RoundRecord>,
    #[serde(skip)]
    pub timings: StageTimings,
}

impl SeaResult {
    pub fn delta(&self) -> Option<f64> {
        self.ci.map(|ci| ci.point)
    }

    fn empty(params: &SeaParams, population: usize, reason: String) -> Self {
        SeaResult {
            community: Vec::new(),
            ci: None,
            guarantee_met: false,
            degenerate: false,
            reason: Some(reason),
            structure: params.structure,
            bounds: params.bounds,
            population,
            neighborhood_target: 0,
            neighborhood_size: 0,
            rounds: Vec::new(),
            timings: StageTimings::default(),
        }
    }
}

struct Candidate {
    members: Vec<NodeId>,
    ci: ConfidenceInterval,
    blb_total: usize,
}

impl Candidate {
    fn beats(&self, other: &Option<Candidate>) -> bool {
        match other {
            None => true,
            Some(o) => prefer(self.ci.point, &self.members, o.ci.point, &o.members),
        }
    }
}

pub fn sea_search(graph: &AttributedGraph, q: NodeId, params: &SeaParams) -> Result<SeaResult> {
    sea_search_with(graph, &mut Homogeneous(graph), q, params)
}

/// The sampling search over an arbitrary [`Topology`]; `graph` supplies the
/// attributes.
pub fn sea_search_with(
    graph: &AttributedGraph,
    topology: &mut dyn Topology,
    q: NodeId,
    params: &SeaParams,
) -> Result<SeaResult> {
    params.validate()?;
    topology.check_query(q)?;
    let structure = params.structure;
    let population = topology.population();
    let mut timings = StageTimings::default();

    let t = Instant::now();
    let min_comm = params.bounds.map_or(structure.min_size(), |b| b.l);
    let target = min_neighborhood_size(population, min_comm, params.hoeffding);
    let mut cache = DistanceCache::new(graph, DistanceParams::new(params.gamma, q)?);
    let neighborhood = build_neighborhood(
        q,
        target,
        |v, out| topology.neighbors(v, out),
        |v| cache.get(v),
    );
    timings.neighborhood = t.elapsed();

    let mut result = SeaResult::empty(params, population, String::new());
    result.reason = None;
    result.neighborhood_target = target;
    result.neighborhood_size = neighborhood.len();

    let t = Instant::now();
    let full = Subgraph::maximal(Arc::new(topology.local_graph(&neighborhood)), q, structure);
    if full.is_empty() {
        result.reason = Some(format!(
            "query node not in any {}",
            match structure.model {
                Model::Core => format!("{}-core", structure.k),
                Model::Truss => format!("{}-truss", structure.k),
            }
        ));
        result.timings = timings;
        return Ok(result);
    }
    if let Some(b) = params.bounds {
        if b.l > full.len() {
            result.reason = Some(format!(
                "size bounds infeasible: l = {} exceeds the maximal structure size {}",
                b.l,
                full.len()
            ));
            result.timings = timings;
            return Ok(result);
        }
    }
    drop(full);

    let dist: Vec<f64> = cache.distances(&neighborhood);
    let mut sampler = SampleState::new(
        neighborhood.clone(),
        sampling_probabilities(&dist),
        q,
        rng::derive_seed(params.seed, &[1]),
    );
    let initial = ((params.lambda * neighborhood.len() as f64).ceil() as usize).max(1);
    sampler.draw(initial);
    timings.sampling += t.elapsed();

    let mut best: Option<Candidate> = None;
    for round in 0..params.max_rounds {
        let round_start = Instant::now();
        let t = Instant::now();
        let local = Arc::new(topology.local_graph(sampler.sample()));
        let dist_local: Vec<f64> = local.globals().iter().map(|&v| cache.get(v)).collect();
        let ql = local.local_of(q).expect("query is always sampled");
        let mut state = Subgraph::maximal(local, q, structure);
        timings.sampling += t.elapsed();

        let t = Instant::now();
        let mut record = RoundRecord {
            round: round + 1,
            sample_size: sampler.sample().len(),
            added: 0,
            candidates: 0,
            estimated: 0,
            delta: None,
            moe: None,
            best_delta: None,
            elapsed: Duration::ZERO,
        };
        let mut round_best: Option<Candidate> = None;
        let mut accepted: Option<(Candidate, bool)> = None;
        let mut alive = !state.is_empty();
        while alive {
            let size = state.len();
            if params.bounds.is_some_and(|b| size < b.l) {
                break;
            }
            record.candidates += 1;
            if params.bounds.is_none_or(|b| size <= b.h) {
                let values: Vec<f64> = state
                    .local_members()
                    .filter(|&v| v != ql)
                    .map(|v| dist_local[v as usize])
                    .collect();
                let point = stable_sum(values.iter().copied()) / values.len() as f64;
                let seed =
                    rng::derive_seed(params.seed, &[2, round as u64, record.candidates as u64]);
                let est = blb_moe(&values, point, &params.blb, seed, params.execution)?;
                record.estimated += 1;
                let cand = Candidate {
                    members: state.members(),
                    ci: est.ci,
                    blb_total: est.blb_total(),
                };
                let verdict = if point > 0.0 {
                    accuracy_met(&cand.ci, params.e).then_some(false)
                } else {
                    (cand.ci.moe <= ZERO_DELTA_MOE).then_some(true)
                };
                if let Some(degenerate) = verdict {
                    accepted = Some((cand, degenerate));
                    break;
                }
                if cand.beats(&round_best) {
                    round_best = Some(cand);
                }
            }
            alive = greedy_next_candidate(&mut state, ql, &dist_local)?;
        }
        timings.estimation += t.elapsed();

        if let Some((cand, degenerate)) = accepted {
            record.delta = Some(cand.ci.point);
            record.moe = Some(cand.ci.moe);
            let best_delta = best
                .as_ref()
                .map_or(cand.ci.point, |b| b.ci.point.min(cand.ci.point));
            record.best_delta = Some(best_delta);
            record.elapsed = round_start.elapsed();
            result.rounds.push(record);
            result.community = cand.members;
            result.ci = Some(cand.ci);
            result.guarantee_met = true;
            result.degenerate = degenerate;
            result.timings = timings;
            return Ok(result);
        }

        if let Some(rb) = &round_best {
            record.delta = Some(rb.ci.point);
            record.moe = Some(rb.ci.moe);
        }
        let growth = match &round_best {
            Some(rb) => incremental_sample_size(
                rb.ci.moe,
                rb.ci.point,
                params.e,
                rb.blb_total.max(1),
                params.blb.m_scale,
            )
            .filter(|&g| g > 0)
            .unwrap_or(record.sample_size),
            None => record.sample_size,
        };
        if let Some(rb) = round_best {
            if rb.beats(&best) {
                best = Some(rb);
            }
        }
        record.best_delta = best.as_ref().map(|b| b.ci.point);

        let last = round + 1 == params.max_rounds || sampler.is_exhausted();
        if !last {
            let t = Instant::now();
            record.added = sampler.draw(growth).len();
            timings.sampling += t.elapsed();
        }
        record.elapsed = round_start.elapsed();
        result.rounds.push(record);
        if last {
            break;
        }
    }

    match best {
        Some(b) => {
            result.community = b.members;
            result.ci = Some(b.ci);
            result.reason = Some("accuracy target not reached".into());
        }
        None => {
            result.reason = Some(match params.bounds {
                Some(_) => "no candidate within size bounds".into(),
                None => "no candidate found in the sample".into(),
            });
        }
    }
    result.timings = timings;
    Ok(result)
}
