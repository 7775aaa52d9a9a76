//! Neighborhood sizing, best-first neighborhood construction and
//! attribute-weighted node sampling.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoeffdingParams {
    pub epsilon: f64,
    pub beta: f64,
}

impl HoeffdingParams {
    pub fn new(epsilon: f64, beta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Config(format!(
                "beta must lie in (0, 1), got {beta}"
            )));
        }
        Ok(HoeffdingParams { epsilon, beta })
    }
}

/// Number of nodes to collect around q so that, with probability `1 - beta`,
/// a community of `min_community` nodes is contained: `(2/eps^2) ln(m(n-m)/beta) + 1`
/// rounded up and capped at `n`.
pub fn min_neighborhood_size(n: usize, min_community: usize, params: HoeffdingParams) -> usize {
    if n <= min_community {
        return n;
    }
    let m = min_community as f64;
    let inner = m * (n as f64 - m) / params.beta;
    let size = 2.0 / (params.epsilon * params.epsilon) * inner.ln() + 1.0;
    if !size.is_finite() || size >= n as f64 {
        n
    } else {
        (size.ceil() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy)]
struct Key(f64, NodeId);

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Best-first expansion from `q`: the frontier is ordered by `(dist, id)` and
/// nodes are finalized in pop order until `target` nodes are collected.
pub fn build_neighborhood(
    q: NodeId,
    target: usize,
    mut neighbors: impl FnMut(NodeId, &mut Vec<NodeId>),
    mut dist: impl FnMut(NodeId) -> f64,
) -> Vec<NodeId> {
    let mut out = Vec::new();
    let mut seen = HashSet::from([q]);
    let mut frontier = BinaryHeap::from([Reverse(Key(0.0, q))]);
    let mut buf = Vec::new();
    while out.len() < target.max(1) {
        let Some(Reverse(Key(_, v))) = frontier.pop() else {
            break;
        };
        out.push(v);
        buf.clear();
        neighbors(v, &mut buf);
        for &w in &buf {
            if seen.insert(w) {
                frontier.push(Reverse(Key(dist(w), w)));
            }
        }
    }
    out
}

/// `P(v) ∝ 1 - f(v, q)` over `dist` (one entry per member). Uniform when every
/// weight is zero.
pub fn sampling_probabilities(dist: &[f64]) -> Vec<f64> {
    let weights: Vec<f64> = dist.iter().map(|&d| (1.0 - d).max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        let n = dist.len().max(1) as f64;
        return vec![1.0 / n; dist.len()];
    }
    weights.into_iter().map(|w| w / total).collect()
}

/// Weighted sampling without replacement over a fixed neighborhood.
///
/// Each node gets an exponential key `-ln(U) / p`; drawing the smallest keys
/// first is the same distribution as repeated proportional draws from the
/// remaining nodes, so every round just continues along one precomputed order.
#[derive(Debug, Clone)]
pub struct SampleState {
    neighborhood: Vec<NodeId>,
    probs: Vec<f64>,
    order: Vec<usize>,
    cursor: usize,
    sample: Vec<NodeId>,
    query: NodeId,
}

impl SampleState {
    /// `neighborhood[i]` has sampling probability `probs[i]`; the query is
    /// sampled up front.
    pub fn new(neighborhood: Vec<NodeId>, probs: Vec<f64>, query: NodeId, seed: u64) -> Self {
        assert_eq!(neighborhood.len(), probs.len());
        let mut rng: Rng = rng::stream(seed, &[0x5a4d]);
        let keys: Vec<f64> = probs
            .iter()
            .map(|&p| {
                let u: f64 = rng.random();
                let e = -(1.0 - u).ln();
                if p > 0.0 {
                    e / p
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        let mut order: Vec<usize> = (0..neighborhood.len())
            .filter(|&i| neighborhood[i] != query)
            .collect();
        order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(a.cmp(&b)));
        SampleState {
            neighborhood,
            probs,
            order,
            cursor: 0,
            sample: vec![query],
            query,
        }
    }

    pub fn neighborhood(&self) -> &[NodeId] {
        &self.neighborhood
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn query(&self) -> NodeId {
        self.query
    }

    /// Current sample, query first, then in draw order.
    pub fn sample(&self) -> &[NodeId] {
        &self.sample
    }

    pub fn remaining(&self) -> usize {
        self.order.len() - self.cursor
    }

    pub fn is_exhausted(&self) -> bool {
        self.remaining() == 0
    }

    /// Draws up to `count` new nodes and returns them. Fewer come back only
    /// when the neighborhood runs out.
    pub fn draw(&mut self, count: usize) -> &[NodeId] {
        let take = count.min(self.remaining());
        let start = self.sample.len();
        for &i in &self.order[self.cursor..self.cursor + take] {
            self.sample.push(self.neighborhood[i]);
        }
        self.cursor += take;
        &self.sample[start..]
    }
}

/// Extra sample size needed to bring a margin of error `moe` down to the
/// acceptance threshold `delta_star * e / (1 + e)`:
/// `blb_total * ((moe / threshold)^(2 m) - 1)`, rounded up, at least 1.
///
/// Returns `Some(0)` when `moe` is already at or under the threshold and
/// `None` when `delta_star` is not positive (no relative threshold exists).
pub fn incremental_sample_size(
    moe: f64,
    delta_star: f64,
    e: f64,
    blb_total: usize,
    m_scale: f64,
) -> Option<usize> {
    if delta_star.is_nan() || delta_star <= 0.0 {
        return None;
    }
    let threshold = delta_star * e / (1.0 + e);
    if moe <= threshold {
        return Some(0);
    }
    let growth = blb_total as f64 * ((moe / threshold).powf(2.0 * m_scale) - 1.0);
    if growth.is_finite() {
        Some((growth.ceil() as usize).max(1))
    } else {
        Some(usize::MAX)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capped_at_population() {
        let p = HoeffdingParams::new(0.1, 0.05).unwrap();
        assert_eq!(min_neighborhood_size(100, 5, p), 100);
        assert_eq!(min_neighborhood_size(3, 5, p), 3);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(HoeffdingParams::new(0.0, 0.05).is_err());
        assert!(HoeffdingParams::new(0.1, 1.0).is_err());
    }

    #[test]
    fn star_best_first() {
        // q = 0 at the center, leaves 1..=5 at distance 0.1 * id
        let nb = |v: NodeId, out: &mut Vec<NodeId>| {
            if v == 0 {
                out.extend([5, 4, 3, 2, 1]);
            } else {
                out.push(0);
            }
        };
        let d = |v: NodeId| v as f64 * 0.1;
        assert_eq!(build_neighborhood(0, 3, nb, d), vec![0, 1, 2]);
        assert_eq!(build_neighborhood(0, 1, nb, d), vec![0]);
        assert_eq!(build_neighborhood(0, 50, nb, d).len(), 6);
    }

    #[test]
    fn probabilities() {
        let p = sampling_probabilities(&[0.0, 0.5]);
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-15 && (p[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(sampling_probabilities(&[1.0, 1.0]), vec![0.5, 0.5]);
        assert_eq!(sampling_probabilities(&[0.2, 1.0])[1], 0.0);
    }

    #[test]
    fn draw_is_deterministic_and_complete() {
        let nodes: Vec<NodeId> = (0..20).collect();
        let probs = vec![0.05; 20];
        let mut a = SampleState::new(nodes.clone(), probs.clone(), 3, 11);
        let mut b = SampleState::new(nodes, probs, 3, 11);
        assert_eq!(a.draw(5), b.draw(5));
        assert_eq!(a.sample()[0], 3);
        a.draw(100);
        assert!(a.is_exhausted());
        assert_eq!(a.sample().len(), 20);
    }

    #[test]
    fn zero_weight_drawn_last() {
        let mut s = SampleState::new(vec![0, 1, 2], vec![0.0, 1.0, 0.0], 0, 5);
        assert_eq!(s.draw(1), &[1]);
        assert_eq!(s.draw(1), &[2]);
    }

    #[test]
    fn growth_at_threshold_is_zero() {
        let t = 0.3 * 0.01 / 1.01;
        assert_eq!(incremental_sample_size(t, 0.3, 0.01, 1000, 0.6), Some(0));
        assert_eq!(incremental_sample_size(0.1, 0.0, 0.01, 1000, 0.6), None);
    }
}
