use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::config::{Mode, QueryConfig};
use crate::error::{Error, Result};
use crate::estimator::{sea_search, ConfidenceInterval, RoundRecord, SeaResult};
use crate::exact::{exact_search, EnumerationStats, ExactOutcome};
use crate::extensions::{project_metapath, sea_search_hetero, SizeBounds};
use crate::graph::{load_graph_files, AttrSchema, AttributedGraph, Model, NodeId};
use crate::metrics::DistanceParams;
use crate::par::Execution;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_CONFIG: i32 = 5;

/// Process exit code for an error that stopped a query.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::Schema(_) | Error::Io(_) => EXIT_PARSE,
        Error::NodeNotFound(_) | Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::Budget(_) => EXIT_BUDGET,
        Error::Config(_) | Error::Contract(_) => EXIT_CONFIG,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Infeasible,
    BudgetExhausted,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryEcho {
    pub q: String,
    pub mode: Mode,
    pub model: Model,
    pub k: usize,
    pub gamma: f64,
    pub e: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub beta: f64,
    pub lambda: f64,
    pub seed: u64,
    pub s: usize,
    pub r: usize,
    pub m: f64,
    pub max_rounds: usize,
    pub size_bound: Option<SizeBounds>,
    pub metapath: Option<String>,
    pub prune_mask: String,
}

impl QueryEcho {
    fn new(q: &str, c: &QueryConfig) -> Self {
        QueryEcho {
            q: q.to_string(),
            mode: c.mode,
            model: c.model,
            k: c.k,
            gamma: c.gamma,
            e: c.e,
            alpha: c.alpha,
            epsilon: c.epsilon,
            beta: c.beta,
            lambda: c.lambda,
            seed: c.seed,
            s: c.s,
            r: c.r,
            m: c.m,
            max_rounds: c.max_rounds,
            size_bound: c.size_bound,
            metapath: c.metapath.clone(),
            prune_mask: c.prune_mask.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborhoodInfo {
    pub population: usize,
    pub target: usize,
    pub size: usize,
}

/// Wall-clock split in milliseconds: neighborhood construction (s1),
/// sampling and structure extraction (s2), candidate estimation (s3).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub s1_ms: f64,
    pub s2_ms: f64,
    pub s3_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub query: QueryEcho,
    pub status: Status,
    pub reason: Option<String>,
    pub detail: Option<String>,
    /// External ids, sorted.
    pub community: Vec<String>,
    pub delta: Option<f64>,
    pub ci: Option<ConfidenceInterval>,
    pub guarantee_met: bool,
    pub degenerate: bool,
    pub rounds: Vec<RoundRecord>,
    pub neighborhood: Option<NeighborhoodInfo>,
    pub enumeration: Option<EnumerationStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl PartialEq for RoundRecord {
    fn eq(&self, other: &Self) -> bool {
        self.round == other.round
            && self.sample_size == other.sample_size
            && self.added == other.added
            && self.candidates == other.candidates
            && self.estimated == other.estimated
            && self.delta == other.delta
            && self.moe == other.moe
            && self.best_delta == other.best_delta
    }
}

impl ResultRecord {
    fn blank(q: &str, config: &QueryConfig, status: Status) -> Self {
        ResultRecord {
            query: QueryEcho::new(q, config),
            status,
            reason: None,
            detail: None,
            community: Vec::new(),
            delta: None,
            ci: None,
            guarantee_met: false,
            degenerate: false,
            rounds: Vec::new(),
            neighborhood: None,
            enumeration: None,
            timings: None,
        }
    }

    /// Record for a query that failed before producing a result.
    pub fn from_error(q: &str, config: &QueryConfig, err: &Error) -> Self {
        let mut r = Self::blank(q, config, Status::Error);
        r.reason = Some(err.reason().to_string());
        r.detail = Some(err.to_string());
        r
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => EXIT_OK,
            Status::Infeasible => EXIT_INFEASIBLE,
            Status::BudgetExhausted => EXIT_BUDGET,
            Status::Error => match self.reason.as_deref() {
                Some("parse_error" | "schema_error" | "io_error") => EXIT_PARSE,
                Some("invalid_config" | "contract_violation") => EXIT_CONFIG,
                Some("budget_exhausted") => EXIT_BUDGET,
                _ => EXIT_INFEASIBLE,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("result records always serialize")
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub execution: Execution,
    /// Include wall-clock timings in the record (breaks byte-identical output).
    pub timings: bool,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Loads graph files, then runs [`run_query`].
pub fn run_query_files(
    edges: &Path,
    attrs: Option<&Path>,
    types: Option<&Path>,
    q: &str,
    config: &QueryConfig,
    options: &RunOptions,
) -> Result<ResultRecord> {
    config.validate()?;
    let (graph, _) = load_graph_files(edges, attrs, types, &AttrSchema::default())?;
    run_query(&graph, q, config, options)
}

/// Runs one query and packs the outcome. Errors are returned only for
/// invalid input; an unanswerable query comes back as a record with status
/// `infeasible`.
pub fn run_query(
    graph: &AttributedGraph,
    q: &str,
    config: &QueryConfig,
    options: &RunOptions,
) -> Result<ResultRecord> {
    config.validate()?;
    let start = Instant::now();
    let qid = graph
        .id(q)
        .ok_or_else(|| Error::NodeNotFound(q.to_string()))?;
    let metapath = config.metapath()?;
    let mut record = match config.mode {
        Mode::Exact => {
            let options_exact = config.exact_options()?;
            match &metapath {
                Some(path) => {
                    if !graph.is_heterogeneous() {
                        return Err(Error::Config("meta-path search needs node types".into()));
                    }
                    crate::extensions::p_neighbors(graph, qid, path)?;
                    let proj = project_metapath(graph, path)?;
                    let local = proj.local_id(qid).expect("query has the target type");
                    let params = DistanceParams::new(config.gamma, local)?;
                    let outcome = exact_search(&proj.graph, params, &options_exact)?;
                    exact_record(&proj.graph, q, config, outcome)
                }
                None => {
                    let params = DistanceParams::new(config.gamma, qid)?;
                    let outcome = exact_search(graph, params, &options_exact)?;
                    exact_record(graph, q, config, outcome)
                }
            }
        }
        Mode::Sea => {
            let params = config.sea_params(options.execution)?;
            let result = match &metapath {
                Some(path) => sea_search_hetero(graph, qid, path, &params)?,
                None => sea_search(graph, qid, &params)?,
            };
            sea_record(graph, q, config, result)
        }
    };
    if options.timings {
        let t = record.timings.get_or_insert_with(Timings::default);
        t.total_ms = ms(start.elapsed());
    } else {
        record.timings = None;
    }
    Ok(record)
}

fn names(graph: &AttributedGraph, members: &[NodeId]) -> Vec<String> {
    let mut out: Vec<String> = members.iter().map(|&v| graph.name(v).to_string()).collect();
    out.sort();
    out
}

fn exact_record(
    graph: &AttributedGraph,
    q: &str,
    config: &QueryConfig,
    outcome: ExactOutcome,
) -> ResultRecord {
    let status = match (&outcome.community, outcome.budget_exhausted) {
        (_, true) => Status::BudgetExhausted,
        (None, false) => Status::Infeasible,
        (Some(_), false) => Status::Ok,
    };
    let mut r = ResultRecord::blank(q, config, status);
    r.enumeration = Some(outcome.stats);
    if let Some(c) = &outcome.community {
        r.community = names(graph, &c.members);
        r.delta = Some(c.delta);
    }
    match status {
        Status::Infeasible => {
            r.reason = Some("infeasible_query".into());
            r.detail = outcome.reason;
        }
        Status::BudgetExhausted => {
            r.reason = Some("budget_exhausted".into());
            r.detail = Some("search budget exhausted; best community so far reported".into());
        }
        _ => {}
    }
    r.timings = Some(Timings {
        s3_ms: ms(outcome.elapsed),
        ..Timings::default()
    });
    r
}

fn sea_record(
    graph: &AttributedGraph,
    q: &str,
    config: &QueryConfig,
    res: SeaResult,
) -> ResultRecord {
    let status = if res.community.is_empty() {
        Status::Infeasible
    } else {
        Status::Ok
    };
    let mut r = ResultRecord::blank(q, config, status);
    r.community = names(graph, &res.community);
    r.delta = res.delta();
    r.ci = res.ci;
    r.guarantee_met = res.guarantee_met;
    r.degenerate = res.degenerate;
    r.neighborhood = Some(NeighborhoodInfo {
        population: res.population,
        target: res.neighborhood_target,
        size: res.neighborhood_size,
    });
    if status == Status::Infeasible {
        r.reason = Some("infeasible_query".into());
    } else if !res.guarantee_met {
        r.reason = Some("accuracy_not_met".into());
    }
    r.detail = res.reason;
    r.timings = Some(Timings {
        s1_ms: ms(res.timings.neighborhood),
        s2_ms: ms(res.timings.sampling),
        s3_ms: ms(res.timings.estimation),
        total_ms: 0.0,
    });
    r.rounds = res.rounds;
    r
}
