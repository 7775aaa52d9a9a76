mod common;

use std::fs;

use attrcs_core::harness::{
    planted_fixture, run_bench, run_query, run_query_files, typed_fixture, BenchConfig, GenConfig,
    Mode, PlantedConfig, QueryConfig, ResultRecord, RunOptions, Status, TypedConfig, RESULT_SCHEMA,
};
use attrcs_core::par::Execution;
use attrcs_core::{Error, Model};
use common::two_cliques;
use serde_json::Value;

fn options(timings: bool) -> RunOptions {
    RunOptions {
        execution: Execution::Sequential,
        timings,
    }
}

fn assert_schema_valid(record: &ResultRecord) {
    let schema: Value = serde_json::from_str(RESULT_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let value: Value = serde_json::from_str(&record.to_json()).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(&value)
        .map(|e| e.to_string())
        .collect();
    assert!(errors.is_empty(), "{errors:?}\n{}", record.to_json());
}

fn exact_config(k: usize, gamma: f64) -> QueryConfig {
    QueryConfig {
        mode: Mode::Exact,
        k,
        gamma,
        ..QueryConfig::default()
    }
}

#[test]
fn two_cliques_query_record() {
    let g = two_cliques();
    let r = run_query(&g, "v5", &exact_config(2, 0.0), &options(false)).unwrap();
    assert_eq!(r.status, Status::Ok);
    assert_eq!(r.community, ["v3", "v5", "v6"]);
    assert!((r.delta.unwrap() - 0.45).abs() < 1e-12);
    assert!(r.enumeration.is_some());
    assert!(r.timings.is_none());
    assert_eq!(r.exit_code(), 0);
    assert_schema_valid(&r);
}

#[test]
fn every_record_kind_matches_schema() {
    let g = two_cliques();
    let sea = run_query(
        &g,
        "v5",
        &QueryConfig {
            k: 2,
            ..QueryConfig::default()
        },
        &options(true),
    )
    .unwrap();
    assert!(sea.timings.is_some() && !sea.rounds.is_empty());
    assert_schema_valid(&sea);

    let infeasible = run_query(&g, "v12", &exact_config(2, 0.5), &options(false)).unwrap();
    assert_eq!(infeasible.status, Status::Infeasible);
    assert_eq!(infeasible.exit_code(), 3);
    assert_schema_valid(&infeasible);

    let truss = QueryConfig {
        model: Model::Truss,
        k: 4,
        ..exact_config(4, 0.3)
    };
    assert_schema_valid(&run_query(&g, "v8", &truss, &options(true)).unwrap());

    let err = run_query(&g, "nobody", &exact_config(2, 0.5), &options(false)).unwrap_err();
    let rec = ResultRecord::from_error("nobody", &exact_config(2, 0.5), &err);
    assert_eq!(rec.status, Status::Error);
    assert_eq!(rec.exit_code(), 3);
    assert_schema_valid(&rec);

    let bad = QueryConfig {
        e: -1.0,
        ..QueryConfig::default()
    };
    let err = run_query(&g, "v5", &bad, &options(false)).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
    assert_eq!(ResultRecord::from_error("v5", &bad, &err).exit_code(), 5);
}

#[test]
fn budget_record() {
    let f = planted_fixture(&PlantedConfig {
        nodes: 300,
        clusters: 2,
        sigma_attr: 0.3,
        ..PlantedConfig::default()
    })
    .unwrap();
    let q = f.graph.name(f.queries[0]);
    let config = QueryConfig {
        max_states: Some(1),
        ..exact_config(3, 0.5)
    };
    let r = run_query(&f.graph, q, &config, &options(false)).unwrap();
    assert_eq!(r.status, Status::BudgetExhausted);
    assert_eq!(r.exit_code(), 4);
    assert!(!r.community.is_empty());
    assert_schema_valid(&r);
}

#[test]
fn records_round_trip_through_json() {
    let g = two_cliques();
    for config in [
        exact_config(2, 0.2),
        QueryConfig {
            k: 2,
            ..QueryConfig::default()
        },
    ] {
        for timings in [false, true] {
            let r = run_query(&g, "v5", &config, &options(timings)).unwrap();
            let back: ResultRecord = serde_json::from_str(&r.to_json()).unwrap();
            assert_eq!(back, r);
            assert_eq!(back.to_json(), r.to_json());
        }
    }
}

#[test]
fn files_and_memory_agree() {
    let dir = tempfile::tempdir().unwrap();
    let f = planted_fixture(&PlantedConfig {
        nodes: 300,
        clusters: 2,
        ..PlantedConfig::default()
    })
    .unwrap();
    f.write(dir.path()).unwrap();
    let config = QueryConfig {
        k: 4,
        ..QueryConfig::default()
    };
    for &q in &f.queries {
        let name = f.graph.name(q);
        let mem = run_query(&f.graph, name, &config, &options(false)).unwrap();
        let disk = run_query_files(
            &dir.path().join("edges.tsv"),
            Some(&dir.path().join("attrs.tsv")),
            None,
            name,
            &config,
            &options(false),
        )
        .unwrap();
        assert_eq!(mem.to_json(), disk.to_json());
    }

    let typed = typed_fixture(&TypedConfig::default()).unwrap();
    let tdir = dir.path().join("typed");
    typed.write(&tdir).unwrap();
    let config = QueryConfig {
        k: 2,
        metapath: Some("A-writes-P-writes-A".into()),
        ..QueryConfig::default()
    };
    for &q in &typed.queries {
        let name = typed.graph.name(q);
        let mem = run_query(&typed.graph, name, &config, &options(false)).unwrap();
        let disk = run_query_files(
            &tdir.join("edges.tsv"),
            Some(&tdir.join("attrs.tsv")),
            Some(&tdir.join("types.tsv")),
            name,
            &config,
            &options(false),
        )
        .unwrap();
        assert_eq!(mem.to_json(), disk.to_json());
    }
}

#[test]
fn gen_then_bench_from_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("gen.toml"),
        "out = \"fixture\"\n[planted]\nseed = 4\nnodes = 400\nclusters = 3\nsigma_attr = 0.3\n",
    )
    .unwrap();
    let gen = GenConfig::load(&dir.path().join("gen.toml")).unwrap();
    assert_eq!(gen.out, dir.path().join("fixture"));
    gen.generate().unwrap().write(&gen.out).unwrap();
    for name in ["edges.tsv", "attrs.tsv", "queries.txt"] {
        assert!(gen.out.join(name).exists(), "{name}");
    }
    assert!(!gen.out.join("types.tsv").exists());

    let masks = ["P1", "P1,P2", "P1,P2,P3"];
    let mut text = String::from(
        "edges = \"fixture/edges.tsv\"\nattrs = \"fixture/attrs.tsv\"\nqueries = \"fixture/queries.txt\"\noracle = true\n[base]\nmode = \"exact\"\nk = 4\n",
    );
    for m in masks {
        text += &format!("[[configs]]\nlabel = \"{m}\"\nprune_mask = \"{m}\"\n");
    }
    text += "[[configs]]\nlabel = \"sea\"\nmode = \"sea\"\n";
    fs::write(dir.path().join("bench.toml"), text).unwrap();
    let bench = BenchConfig::load(&dir.path().join("bench.toml")).unwrap();
    let report = run_bench(&bench, Execution::Sequential).unwrap();
    assert_eq!(report.rows.len(), 4);
    let (exact, sea) = report.rows.split_at(3);
    let explored: Vec<f64> = exact.iter().map(|r| r.mean_explored.unwrap()).collect();
    assert!(explored.windows(2).all(|w| w[1] <= w[0]), "{explored:?}");
    for row in &report.rows {
        assert_eq!(
            (row.queries, row.answered, row.failures),
            (3, 3, 0),
            "{}",
            row.label
        );
    }
    for row in exact {
        assert_eq!(row.mean_delta, exact[0].mean_delta);
        assert_eq!(row.mean_rel_error, None);
    }
    let sea = &sea[0];
    assert!(sea.mean_rel_error.unwrap() >= 0.0);
    assert!(sea.mean_delta.unwrap() >= exact[0].mean_delta.unwrap() - 1e-12);
    assert!(sea.mean_rounds.unwrap() >= 1.0);
    assert_eq!(sea.mean_explored, None);

    let mut csv = Vec::new();
    report.write_csv(&mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    let mut lines = csv.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("label,mode,model,k,e,lambda,prune_mask"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn empty_query_file_gives_empty_rows() {
    let dir = tempfile::tempdir().unwrap();
    let f = planted_fixture(&PlantedConfig {
        nodes: 200,
        clusters: 2,
        ..PlantedConfig::default()
    })
    .unwrap();
    f.write(dir.path()).unwrap();
    fs::write(dir.path().join("none.txt"), "").unwrap();
    fs::write(
        dir.path().join("bench.toml"),
        "edges = \"edges.tsv\"\nattrs = \"attrs.tsv\"\nqueries = \"none.txt\"\n[base]\nk = 3\n",
    )
    .unwrap();
    let bench = BenchConfig::load(&dir.path().join("bench.toml")).unwrap();
    let report = run_bench(&bench, Execution::Sequential).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].queries, 0);
    assert_eq!(report.rows[0].answered, 0);
    assert_eq!(report.rows[0].mean_delta, None);
}

#[test]
fn bad_bench_and_gen_files() {
    assert!(BenchConfig::from_toml("unknown_key = 1\n").is_err());
    assert!(BenchConfig::from_toml("[base]\nmode = \"fast\"\n").is_err());
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.toml"), "out = \"x\"\n").unwrap();
    assert!(GenConfig::load(&dir.path().join("g.toml"))
        .unwrap()
        .generate()
        .is_err());
    fs::write(
        dir.path().join("g.toml"),
        "out = \"x\"\n[planted]\nnodes = -3\n",
    )
    .unwrap();
    assert!(GenConfig::load(&dir.path().join("g.toml")).is_err());
}

#[test]
fn schema_rejects_malformed_records() {
    let schema: Value = serde_json::from_str(RESULT_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let g = two_cliques();
    let ok: Value = serde_json::from_str(
        &run_query(&g, "v5", &exact_config(2, 0.0), &options(false))
            .unwrap()
            .to_json(),
    )
    .unwrap();
    assert!(validator.is_valid(&ok));

    let mut bad = ok.clone();
    bad["query"]["e"] = 0.0.into();
    assert!(!validator.is_valid(&bad));
    bad["status"] = "error".into();
    assert!(validator.is_valid(&bad));

    let mut extra = ok.clone();
    extra["surprise"] = 1.into();
    assert!(!validator.is_valid(&extra));

    let mut missing = ok.clone();
    missing.as_object_mut().unwrap().remove("delta");
    assert!(!validator.is_valid(&missing));

    let mut status = ok;
    status["status"] = "fine".into();
    assert!(!validator.is_valid(&status));
}
