use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{BlbParams, SeaParams};
use crate::exact::{Budget, ExactOptions, PruneMask};
use crate::extensions::{MetaPath, SizeBounds};
use crate::graph::{Model, Structure};
use crate::par::Execution;
use crate::sampler::HoeffdingParams;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    #[default]
    Sea,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "sea" => Ok(Mode::Sea),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

/// Every knob of a single query. Also the `[base]` / `[[configs]]` tables of
/// a bench file, so field names are the TOML keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QueryConfig {
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
    pub max_states: Option<u64>,
    pub time_limit_ms: Option<u64>,
}

impl Default for QueryConfig {
    fn default() -> Self {
        let blb = BlbParams::default();
        QueryConfig {
            mode: Mode::Sea,
            model: Model::Core,
            k: 4,
            gamma: 0.5,
            e: 0.02,
            alpha: blb.alpha,
            epsilon: 0.05,
            beta: 0.05,
            lambda: 0.2,
            seed: 0,
            s: blb.s,
            r: blb.r,
            m: blb.m_scale,
            max_rounds: 10,
            size_bound: None,
            metapath: None,
            prune_mask: PruneMask::ALL.to_string(),
            max_states: None,
            time_limit_ms: None,
        }
    }
}

impl QueryConfig {
    pub fn structure(&self) -> Structure {
        Structure {
            model: self.model,
            k: self.k,
        }
    }

    pub fn prune(&self) -> Result<PruneMask> {
        self.prune_mask.parse()
    }

    pub fn metapath(&self) -> Result<Option<MetaPath>> {
        self.metapath.as_deref().map(str::parse).transpose()
    }

    /// Checks every range before anything runs.
    pub fn validate(&self) -> Result<()> {
        self.sea_params(Execution::Sequential)?.validate()?;
        self.prune()?;
        self.metapath()?;
        if self.max_states == Some(0) {
            return Err(Error::Config("max_states must be positive".into()));
        }
        Ok(())
    }

    pub fn sea_params(&self, execution: Execution) -> Result<SeaParams> {
        let mut p = SeaParams::new(self.structure());
        p.gamma = self.gamma;
        p.e = self.e;
        p.hoeffding = HoeffdingParams {
            epsilon: self.epsilon,
            beta: self.beta,
        };
        p.lambda = self.lambda;
        p.blb = BlbParams {
            s: self.s,
            m_scale: self.m,
            r: self.r,
            alpha: self.alpha,
        };
        p.seed = self.seed;
        p.max_rounds = self.max_rounds;
        p.bounds = self.size_bound;
        p.execution = execution;
        Ok(p)
    }

    pub fn exact_options(&self) -> Result<ExactOptions> {
        let mut o = ExactOptions::new(self.structure())
            .with_prune(self.prune()?)
            .with_budget(Budget {
                max_states: self.max_states,
                time_limit: self.time_limit_ms.map(Duration::from_millis),
            });
        o.bounds = self.size_bound;
        Ok(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        QueryConfig::default().validate().unwrap();
    }

    #[test]
    fn ranges_are_checked() {
        let bad = [
            QueryConfig {
                e: 0.0,
                ..Default::default()
            },
            QueryConfig {
                alpha: 1.0,
                ..Default::default()
            },
            QueryConfig {
                lambda: 1.5,
                ..Default::default()
            },
            QueryConfig {
                m: 1.0,
                ..Default::default()
            },
            QueryConfig {
                gamma: -0.1,
                ..Default::default()
            },
            QueryConfig {
                k: 0,
                ..Default::default()
            },
            QueryConfig {
                prune_mask: "P7".into(),
                ..Default::default()
            },
            QueryConfig {
                metapath: Some("A-P".into()),
                ..Default::default()
            },
            QueryConfig {
                size_bound: Some(SizeBounds::new(2, 9)),
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(Error::Config(_))), "{c:?}");
        }
    }

    #[test]
    fn toml_keys() {
        let c: QueryConfig = toml::from_str(
            "mode = \"exact\"\nmodel = \"truss\"\nk = 3\nsize_bound = { l = 3, h = 8 }\n",
        )
        .unwrap();
        assert_eq!(c.mode, Mode::Exact);
        assert_eq!(c.structure(), Structure::truss(3));
        assert_eq!(c.size_bound, Some(SizeBounds::new(3, 8)));
        assert!(toml::from_str::<QueryConfig>("kk = 3").is_err());
    }
}
