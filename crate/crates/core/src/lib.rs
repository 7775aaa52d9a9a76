//! Community search over attributed graphs.
//!
//! Given a query node `q`, find a connected k-core (or k-truss) containing `q`
//! whose members are, on average, closest to `q` in attribute space. Two
//! solvers are provided:
//!
//! * [`exact::exact_search`], a depth-first branch-and-bound over cascading
//!   deletions with three independent pruning rules;
//! * [`estimator::sea_search`], which samples a query-centred neighborhood,
//!   walks greedy candidates and stops once a bootstrap confidence interval
//!   certifies the requested relative error.
//!
//! [`extensions`] adds meta-path search on typed graphs and size-bounded
//! search; [`harness`] holds the query runner, benchmark driver and
//! synthetic fixture generator behind the `attrcs` binary.

pub mod error;
pub mod estimator;
pub mod exact;
pub mod extensions;
pub mod graph;
pub mod harness;
pub mod metrics;
pub mod oracle;
pub mod par;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
pub use graph::{AttributedGraph, GraphBuilder, Model, NodeId, Structure};
pub use metrics::DistanceParams;
