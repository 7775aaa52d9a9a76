//! Parallel vs sequential execution for the data-parallel hot spots.
//!
//! cargo bench -p attrcs-core --bench search

use std::hint::black_box;

use attrcs_core::estimator::{blb_moe, sea_search, BlbParams, SeaParams};
use attrcs_core::harness::{planted_fixture, run_bench_on, PlantedConfig, QueryConfig};
use attrcs_core::par::Execution;
use attrcs_core::rng;
use attrcs_core::Structure;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::Rng;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn blb(c: &mut Criterion) {
    let mut group = c.benchmark_group("blb_moe");
    let mut r = rng::stream(1, &[]);
    for n in [1_000usize, 20_000] {
        let values: Vec<f64> = (0..n).map(|_| r.random::<f64>()).collect();
        let params = BlbParams {
            s: 16,
            ..BlbParams::default()
        };
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &values, |b, v| {
                b.iter(|| blb_moe(black_box(v), 0.5, &params, 7, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn sea(c: &mut Criterion) {
    let f = planted_fixture(&PlantedConfig {
        seed: 3,
        nodes: 5000,
        clusters: 4,
        background_degree: 4.0,
        clique: 14,
        extra: 6,
        sigma_attr: 0.3,
        ..PlantedConfig::default()
    })
    .unwrap();
    let q = f.queries[0];
    let mut group = c.benchmark_group("sea_search");
    group.sample_size(20);
    for (name, exec) in MODES {
        let params = SeaParams {
            e: 0.005,
            execution: exec,
            ..SeaParams::new(Structure::core(6))
        };
        group.bench_function(name, |b| {
            b.iter(|| sea_search(&f.graph, black_box(q), &params).unwrap())
        });
    }
    group.finish();
}

fn query_set(c: &mut Criterion) {
    let f = planted_fixture(&PlantedConfig {
        seed: 4,
        nodes: 4000,
        clusters: 16,
        ..PlantedConfig::default()
    })
    .unwrap();
    let queries: Vec<String> = f
        .queries
        .iter()
        .map(|&q| f.graph.name(q).to_string())
        .collect();
    let grid = vec![(
        "base".to_string(),
        QueryConfig {
            k: 4,
            ..QueryConfig::default()
        },
    )];
    let mut group = c.benchmark_group("query_set");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| run_bench_on(&f.graph, &queries, &grid, false, 1, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, blb, sea, query_set);
criterion_main!(benches);
