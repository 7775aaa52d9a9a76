//! Margin-of-error estimation for candidate communities and the sampling
//! search driver built on top of it.

mod sea;

use rand::Rng as _;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{precedes, Subgraph};
use crate::metrics::stable_sum;
use crate::par::Execution;
use crate::rng::{self, Rng};

pub use sea::{
    sea_search, sea_search_with, Homogeneous, RoundRecord, SeaParams, SeaResult, StageTimings,
    Topology,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlbParams {
    /// Number of disjoint subsamples.
    pub s: usize,
    /// Subsample size is `ceil(N^m_scale)`.
    pub m_scale: f64,
    /// Bootstrap resamples per subsample.
    pub r: usize,
    pub alpha: f64,
}

impl Default for BlbParams {
    fn default() -> Self {
        BlbParams {
            s: 8,
            m_scale: 0.6,
            r: 100,
            alpha: 0.05,
        }
    }
}

impl BlbParams {
    pub fn validate(&self) -> Result<()> {
        if self.s < 1 {
            return Err(Error::Config("s must be at least 1".into()));
        }
        if !(0.5..1.0).contains(&self.m_scale) {
            return Err(Error::Config(format!(
                "m must lie in [0.5, 1), got {}",
                self.m_scale
            )));
        }
        if self.r < 2 {
            return Err(Error::Config("r must be at least 2".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub point: f64,
    pub moe: f64,
    pub level: f64,
}

impl ConfidenceInterval {
    pub fn lower(&self) -> f64 {
        self.point - self.moe
    }

    pub fn upper(&self) -> f64 {
        self.point + self.moe
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower() <= x && x <= self.upper()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlbEstimate {
    pub ci: ConfidenceInterval,
    /// Subsamples actually used (may be below the requested `s`).
    pub subsamples: usize,
    pub subsample_size: usize,
}

impl BlbEstimate {
    /// Number of points covered by the subsamples.
    pub fn blb_total(&self) -> usize {
        self.subsamples * self.subsample_size
    }
}

/// Upper `alpha/2` critical value of the standard normal.
pub fn z_critical(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(inverse_normal_cdf(1.0 - alpha / 2.0))
}

/// Wichura's AS241 (PPND16), relative accuracy about 1e-16.
pub fn inverse_normal_cdf(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_5,
        1.331_416_678_917_843_8e2,
        1.971_590_950_306_551_3e3,
        1.373_169_376_550_946e4,
        4.592_195_393_154_987e4,
        6.726_577_092_700_87e4,
        3.343_057_558_358_813e4,
        2.509_080_928_730_122_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091e1,
        6.871_870_074_920_579e2,
        5.394_196_021_424_751e3,
        2.121_379_430_158_659_7e4,
        3.930_789_580_009_271e4,
        2.872_908_573_572_194_3e4,
        5.226_495_278_852_545e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_5,
        4.630_337_846_156_546,
        5.769_497_221_460_691,
        3.647_848_324_763_204_5,
        1.270_458_252_452_368_4,
        2.417_807_251_774_506e-1,
        2.272_384_498_926_918_4e-2,
        7.745_450_142_783_414e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_759,
        1.676_384_830_183_803_8,
        6.897_673_349_851e-1,
        1.481_039_764_274_800_8e-1,
        1.519_866_656_361_645_7e-2,
        5.475_938_084_995_345e-4,
        1.050_750_071_644_416_9e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103,
        5.463_784_911_164_114,
        1.784_826_539_917_291_3,
        2.965_605_718_285_048_7e-1,
        2.653_218_952_657_612_4e-2,
        1.242_660_947_388_078_4e-3,
        2.711_555_568_743_487_6e-5,
        2.010_334_399_292_288_1e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_88e-1,
        1.369_298_809_227_358e-1,
        1.487_536_129_085_061_5e-2,
        7.868_691_311_456_133e-4,
        1.846_318_317_510_054_8e-5,
        1.421_511_758_316_446e-7,
        2.044_263_103_389_939_7e-15,
    ];
    fn poly(c: &[f64; 8], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
    }

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

/// Standard deviation of `r` bootstrap means, each over a resample of
/// `values.len()` points drawn with replacement.
pub fn bootstrap_sigma(values: &[f64], r: usize, rng: &mut Rng) -> f64 {
    bootstrap_sigma_with(values, r, values.len(), rng)
}

/// As [`bootstrap_sigma`] but with resamples of `resample_size` points. The
/// resample is drawn as multinomial counts over `values`, so the cost per
/// resample is `O(values.len())` whatever the resample size.
pub fn bootstrap_sigma_with(values: &[f64], r: usize, resample_size: usize, rng: &mut Rng) -> f64 {
    let b = values.len();
    if b < 2 || r < 2 || resample_size == 0 {
        return 0.0;
    }
    // Work with offsets from one value so constant inputs give exactly zero.
    let shift = values[0];
    let means: Vec<f64> = (0..r)
        .map(|_| {
            let mut left = resample_size as u64;
            let mut acc = Vec::with_capacity(b);
            for (i, &x) in values.iter().enumerate() {
                let c = if i + 1 == b {
                    left
                } else if left == 0 {
                    0
                } else {
                    let p = 1.0 / (b - i) as f64;
                    Binomial::new(left, p).expect("valid binomial").sample(rng)
                };
                left -= c;
                acc.push(c as f64 * (x - shift));
            }
            stable_sum(acc) / resample_size as f64
        })
        .collect();
    let mean = stable_sum(means.iter().copied()) / r as f64;
    let ss = stable_sum(means.iter().map(|m| (m - mean) * (m - mean)));
    (ss / (r - 1) as f64).sqrt()
}

/// Bag of little bootstraps over `values` (the distances of a community's
/// non-query members): `s` disjoint subsamples of `ceil(N^m)` points, each
/// bootstrapped with resamples of size `N`; the margin is the mean of
/// `z * sigma_i`. `point` is reported as is.
pub fn blb_moe(
    values: &[f64],
    point: f64,
    params: &BlbParams,
    seed: u64,
    execution: Execution,
) -> Result<BlbEstimate> {
    params.validate()?;
    let z = z_critical(params.alpha)?;
    let level = 1.0 - params.alpha;
    let n = values.len();
    if n == 0 {
        return Ok(BlbEstimate {
            ci: ConfidenceInterval {
                point,
                moe: 0.0,
                level,
            },
            subsamples: 0,
            subsample_size: 0,
        });
    }
    let b = ((n as f64).powf(params.m_scale).ceil() as usize).clamp(1, n);
    let s = params.s.min(n / b).max(1);

    let mut rng = rng::stream(seed, &[0xb1b]);
    let mut idx: Vec<usize> = (0..n).collect();
    let take = s * b;
    for i in 0..take {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    let jobs: Vec<(u64, Vec<f64>)> = idx[..take]
        .chunks(b)
        .enumerate()
        .map(|(i, chunk)| (i as u64, chunk.iter().map(|&j| values[j]).collect()))
        .collect();
    let margins = execution.map(jobs, |(i, sub)| {
        let mut rng = rng::stream(seed, &[0xb1b, i + 1]);
        z * bootstrap_sigma_with(&sub, params.r, n, &mut rng)
    });
    let moe = stable_sum(margins) / s as f64;
    Ok(BlbEstimate {
        ci: ConfidenceInterval { point, moe, level },
        subsamples: s,
        subsample_size: b,
    })
}

/// Relative-error stopping rule: `moe <= point * e / (1 + e)`.
pub fn accuracy_met(ci: &ConfidenceInterval, e: f64) -> bool {
    ci.moe <= ci.point * e / (1.0 + e)
}

/// Deletes the member farthest from the query (ties: smaller id) and lets the
/// structure cascade. Returns false once the query is gone, leaving `state`
/// empty.
pub fn greedy_next_candidate(state: &mut Subgraph, q: u32, dist: &[f64]) -> Result<bool> {
    let target = state.local_members().filter(|&v| v != q).reduce(|best, v| {
        if precedes(dist, v, best) {
            v
        } else {
            best
        }
    });
    let Some(v) = target else {
        return Ok(false);
    };
    let d = state.delete_and_maintain(v, q, dist)?;
    Ok(!d.query_lost() && !state.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_values() {
        assert!((z_critical(0.05).unwrap() - 1.959_963_984_540_054).abs() < 1e-12);
        assert!((z_critical(0.3174).unwrap() - 1.0).abs() < 1e-3);
        assert!(z_critical(0.999_999).unwrap().abs() < 1e-5);
        assert!(z_critical(0.0).is_err());
        assert!(z_critical(1.0).is_err());
    }

    #[test]
    fn constant_values_have_zero_sigma() {
        let mut rng = rng::stream(1, &[]);
        assert_eq!(bootstrap_sigma(&[0.4; 30], 50, &mut rng), 0.0);
    }

    #[test]
    fn two_point_sigma() {
        // resample mean of two points: var = 0.25 / 2
        let mut rng = rng::stream(2, &[]);
        let s = bootstrap_sigma(&[0.0, 1.0], 10_000, &mut rng);
        assert!((s - 0.5 / 2f64.sqrt()).abs() / 0.353_553 < 0.05, "{s}");
    }

    #[test]
    fn subsample_count_shrinks() {
        let values = vec![0.5; 10];
        let est = blb_moe(
            &values,
            0.5,
            &BlbParams::default(),
            3,
            Execution::Sequential,
        )
        .unwrap();
        // ceil(10^0.6) = 4, so at most 2 disjoint subsamples
        assert_eq!(est.subsample_size, 4);
        assert_eq!(est.subsamples, 2);
        assert_eq!(est.ci.moe, 0.0);
    }

    #[test]
    fn threshold_rule() {
        let ci = |moe| ConfidenceInterval {
            point: 0.3,
            moe,
            level: 0.95,
        };
        assert!(!accuracy_met(&ci(3.5e-3), 0.01));
        assert!(accuracy_met(&ci(0.0), 0.01));
        assert!(accuracy_met(&ci(0.3 * 0.01 / 1.01), 0.01));
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let values: Vec<f64> = (0..500).map(|i| (i % 17) as f64 / 17.0).collect();
        let p = BlbParams::default();
        let a = blb_moe(&values, 0.4, &p, 9, Execution::Parallel).unwrap();
        let b = blb_moe(&values, 0.4, &p, 9, Execution::Sequential).unwrap();
        assert_eq!(a.ci.moe.to_bits(), b.ci.moe.to_bits());
    }
}
