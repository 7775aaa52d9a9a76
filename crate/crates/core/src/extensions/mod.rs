//! Size-bounded search, the model-dependent minimum size, and meta-path
//! search on heterogeneous graphs.

mod metapath;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{sea_search, SeaParams, SeaResult};
use crate::graph::{AttributedGraph, Model, NodeId, Structure};

pub use metapath::{
    p_neighbors, project_metapath, sea_search_hetero, MetaPath, MetaPathTopology, Projection,
};

/// Fewest nodes any community of the model can have: a (k+1)-clique for a
/// k-core, k nodes for a k-truss.
pub fn model_minimum_size(model: Model, k: usize) -> usize {
    match model {
        Model::Core => k + 1,
        Model::Truss => k,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeBounds {
    pub l: usize,
    pub h: usize,
}

impl SizeBounds {
    pub fn new(l: usize, h: usize) -> Self {
        SizeBounds { l, h }
    }

    pub fn validate(&self, structure: Structure) -> Result<()> {
        let min = structure.min_size();
        if self.l < min || self.l > self.h {
            return Err(Error::Config(format!(
                "size bounds [{}, {}] invalid: need {min} <= l <= h",
                self.l, self.h
            )));
        }
        Ok(())
    }

    pub fn contains(&self, size: usize) -> bool {
        self.l <= size && size <= self.h
    }
}

impl FromStr for SizeBounds {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |x: &str| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("invalid size bound {s:?}, expected l,h")))
        };
        match s.split_once(',') {
            Some((l, h)) => Ok(SizeBounds::new(parse(l)?, parse(h)?)),
            None => Err(Error::Config(format!(
                "invalid size bound {s:?}, expected l,h"
            ))),
        }
    }
}

impl fmt::Display for SizeBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.l, self.h)
    }
}

/// Sampling search restricted to communities with `l <= size <= h`.
pub fn sea_search_size_bounded(
    graph: &AttributedGraph,
    q: NodeId,
    bounds: SizeBounds,
    params: &SeaParams,
) -> Result<SeaResult> {
    let mut params = params.clone();
    params.bounds = Some(bounds);
    sea_search(graph, q, &params)
}
