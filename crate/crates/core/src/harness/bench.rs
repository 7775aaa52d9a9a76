//! Query-set sweeps over a grid of configurations, reported as CSV.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{Mode, QueryConfig};
use super::gen::{planted_fixture, PlantedConfig};
use super::record::{run_query, ResultRecord, RunOptions, Status};
use crate::error::{Error, Result};
use crate::graph::{load_graph_files, AttrSchema, AttributedGraph};
use crate::par::Execution;

/// A bench file. Graph input is either a set of files or a planted fixture;
/// every `[[configs]]` table is laid over `[base]` key by key.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub edges: Option<PathBuf>,
    pub attrs: Option<PathBuf>,
    pub types: Option<PathBuf>,
    /// One query id per line. Defaults to the fixture's planted queries.
    pub queries: Option<PathBuf>,
    pub planted: Option<PlantedConfig>,
    /// CSV destination; stdout when absent.
    pub out: Option<PathBuf>,
    /// JSON-lines dump of every per-query record.
    pub records: Option<PathBuf>,
    /// Compare against exact search for relative error.
    pub oracle: bool,
    pub repeats: usize,
    pub base: QueryConfig,
    pub configs: Vec<toml::Table>,
}

impl BenchConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("bench config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut c = Self::from_toml(&fs::read_to_string(path)?)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut c.edges,
            &mut c.attrs,
            &mut c.types,
            &mut c.queries,
            &mut c.out,
            &mut c.records,
        ] {
            if let Some(p) = p.as_mut() {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(c)
    }

    /// The effective configurations, labelled. A `label` key inside a
    /// `[[configs]]` table names the row; otherwise rows are numbered.
    pub fn grid(&self) -> Result<Vec<(String, QueryConfig)>> {
        if self.configs.is_empty() {
            return Ok(vec![("base".to_string(), self.base.clone())]);
        }
        let base = toml::Table::try_from(&self.base)
            .map_err(|e| Error::Config(format!("bench base: {e}")))?;
        let mut out = Vec::new();
        for (i, overlay) in self.configs.iter().enumerate() {
            let mut merged = base.clone();
            let mut label = format!("config{i}");
            for (key, value) in overlay {
                if key == "label" {
                    label = value
                        .as_str()
                        .ok_or_else(|| Error::Config("label must be a string".into()))?
                        .to_string();
                } else {
                    merged.insert(key.clone(), value.clone());
                }
            }
            let config: QueryConfig = merged
                .try_into()
                .map_err(|e| Error::Config(format!("{label}: {e}")))?;
            config.validate()?;
            out.push((label, config));
        }
        Ok(out)
    }
}

/// One CSV line: averages over the queries that returned a record.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub label: String,
    pub mode: String,
    pub model: String,
    pub k: usize,
    pub e: f64,
    pub lambda: f64,
    pub prune_mask: String,
    pub queries: usize,
    pub answered: usize,
    pub failures: usize,
    pub mean_delta: Option<f64>,
    pub mean_rel_error: Option<f64>,
    pub within_e: Option<f64>,
    pub guarantee_rate: Option<f64>,
    pub mean_total_ms: f64,
    pub mean_s1_ms: f64,
    pub mean_s2_ms: f64,
    pub mean_s3_ms: f64,
    pub mean_explored: Option<f64>,
    pub mean_pruned_p1: Option<f64>,
    pub mean_pruned_p2: Option<f64>,
    pub mean_pruned_p3: Option<f64>,
    pub mean_rounds: Option<f64>,
}

pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub records: Vec<(String, Vec<std::result::Result<ResultRecord, String>>)>,
}

impl BenchReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(w);
        for row in &self.rows {
            csv.serialize(row)
                .map_err(|e| Error::Config(e.to_string()))?;
        }
        csv.flush()?;
        Ok(())
    }
}

fn mean(xs: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for x in xs {
        sum += x;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

fn read_queries(path: &Path) -> Result<Vec<String>> {
    Ok(fs::read_to_string(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

/// Loads the graph and query list described by `config`.
pub fn bench_inputs(config: &BenchConfig) -> Result<(AttributedGraph, Vec<String>)> {
    let (graph, planted) = match (&config.edges, &config.planted) {
        (Some(edges), None) => {
            let (g, _) = load_graph_files(
                edges,
                config.attrs.as_deref(),
                config.types.as_deref(),
                &AttrSchema::default(),
            )?;
            (g, Vec::new())
        }
        (None, Some(p)) => {
            let f = planted_fixture(p)?;
            let names = f
                .queries
                .iter()
                .map(|&q| f.graph.name(q).to_string())
                .collect();
            (f.graph, names)
        }
        _ => {
            return Err(Error::Config(
                "bench config needs exactly one of `edges` or `[planted]`".into(),
            ))
        }
    };
    let queries = match &config.queries {
        Some(p) => read_queries(p)?,
        None => planted,
    };
    Ok((graph, queries))
}

pub fn run_bench(config: &BenchConfig, execution: Execution) -> Result<BenchReport> {
    let grid = config.grid()?;
    let (graph, queries) = bench_inputs(config)?;
    run_bench_on(
        &graph,
        &queries,
        &grid,
        config.oracle,
        config.repeats.max(1),
        execution,
    )
}

/// Runs each configuration of `grid` over `queries`. Queries fan out over the
/// worker pool; each query itself runs sequentially. With `repeats > 1` the
/// fastest of the repeated runs supplies the timings.
pub fn run_bench_on(
    graph: &AttributedGraph,
    queries: &[String],
    grid: &[(String, QueryConfig)],
    oracle: bool,
    repeats: usize,
    execution: Execution,
) -> Result<BenchReport> {
    let options = RunOptions {
        execution: Execution::Sequential,
        timings: true,
    };
    let mut reference: HashMap<(String, String), Option<f64>> = HashMap::new();
    let mut rows = Vec::new();
    let mut all = Vec::new();

    for (label, config) in grid {
        let records: Vec<std::result::Result<ResultRecord, String>> =
            execution.map(queries.to_vec(), |q| {
                let mut best: Option<ResultRecord> = None;
                for _ in 0..repeats {
                    let r = run_query(graph, &q, config, &options).map_err(|e| e.to_string())?;
                    best = Some(match best {
                        Some(b) if total_ms(&b) <= total_ms(&r) => b,
                        _ => r,
                    });
                }
                Ok(best.expect("repeats is positive"))
            });

        let mut rel_errors = Vec::new();
        if oracle && config.mode == Mode::Sea {
            let exact = QueryConfig {
                mode: Mode::Exact,
                ..config.clone()
            };
            let key_cfg = format!(
                "{}|{}|{}|{:?}|{:?}",
                exact.model, exact.k, exact.gamma, exact.size_bound, exact.metapath
            );
            let missing: Vec<String> = queries
                .iter()
                .filter(|q| !reference.contains_key(&((*q).clone(), key_cfg.clone())))
                .cloned()
                .collect();
            let found = execution.map(missing.clone(), |q| {
                run_query(graph, &q, &exact, &RunOptions::default())
                    .ok()
                    .filter(|r| r.status == Status::Ok)
                    .and_then(|r| r.delta)
            });
            for (q, d) in missing.into_iter().zip(found) {
                reference.insert((q, key_cfg.clone()), d);
            }
            for (q, r) in queries.iter().zip(&records) {
                let Ok(r) = r else { continue };
                let (Some(d), Some(Some(opt))) =
                    (r.delta, reference.get(&(q.clone(), key_cfg.clone())))
                else {
                    continue;
                };
                if *opt > 0.0 {
                    rel_errors.push((d - opt).abs() / opt);
                }
            }
        }

        rows.push(summarize(label, config, &records, &rel_errors));
        all.push((label.clone(), records));
    }
    Ok(BenchReport { rows, records: all })
}

fn total_ms(r: &ResultRecord) -> f64 {
    r.timings.map_or(0.0, |t| t.total_ms)
}

fn summarize(
    label: &str,
    config: &QueryConfig,
    records: &[std::result::Result<ResultRecord, String>],
    rel_errors: &[f64],
) -> BenchRow {
    let ok: Vec<&ResultRecord> = records.iter().filter_map(|r| r.as_ref().ok()).collect();
    let answered: Vec<&ResultRecord> = ok.iter().copied().filter(|r| r.delta.is_some()).collect();
    let timing = |f: fn(&super::record::Timings) -> f64| {
        mean(ok.iter().filter_map(|r| r.timings.as_ref()).map(f)).unwrap_or(0.0)
    };
    let enumeration: Vec<_> = ok.iter().filter_map(|r| r.enumeration).collect();
    let sea = config.mode == Mode::Sea;
    BenchRow {
        label: label.to_string(),
        mode: match config.mode {
            Mode::Exact => "exact".into(),
            Mode::Sea => "sea".into(),
        },
        model: config.model.to_string(),
        k: config.k,
        e: config.e,
        lambda: config.lambda,
        prune_mask: config.prune_mask.clone(),
        queries: records.len(),
        answered: answered.len(),
        failures: records.len() - ok.len(),
        mean_delta: mean(answered.iter().filter_map(|r| r.delta)),
        mean_rel_error: mean(rel_errors.iter().copied()),
        within_e: mean(
            rel_errors
                .iter()
                .map(|&x| if x <= config.e { 1.0 } else { 0.0 }),
        ),
        guarantee_rate: if sea {
            mean(ok.iter().map(|r| if r.guarantee_met { 1.0 } else { 0.0 }))
        } else {
            None
        },
        mean_total_ms: timing(|t| t.total_ms),
        mean_s1_ms: timing(|t| t.s1_ms),
        mean_s2_ms: timing(|t| t.s2_ms),
        mean_s3_ms: timing(|t| t.s3_ms),
        mean_explored: mean(enumeration.iter().map(|s| s.explored as f64)),
        mean_pruned_p1: mean(enumeration.iter().map(|s| s.pruned_duplicate as f64)),
        mean_pruned_p2: mean(enumeration.iter().map(|s| s.pruned_unnecessary as f64)),
        mean_pruned_p3: mean(enumeration.iter().map(|s| s.pruned_unpromising as f64)),
        mean_rounds: if sea {
            mean(ok.iter().map(|r| r.rounds.len() as f64))
        } else {
            None
        },
    }
}
