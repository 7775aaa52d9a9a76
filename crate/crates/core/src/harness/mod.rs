//! Query configuration, result records, benchmark sweeps and fixture
//! generation shared by the `attrcs` binary and the test suites.

mod bench;
mod config;
mod gen;
mod record;

pub use bench::{bench_inputs, run_bench, run_bench_on, BenchConfig, BenchReport, BenchRow};
pub use config::{Mode, QueryConfig};
pub use gen::{planted_fixture, typed_fixture, Fixture, GenConfig, PlantedConfig, TypedConfig};
pub use record::{
    exit_code, run_query, run_query_files, NeighborhoodInfo, QueryEcho, ResultRecord, RunOptions,
    Status, Timings, EXIT_BUDGET, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_OK, EXIT_PARSE,
};

/// JSON schema of a serialized [`ResultRecord`].
pub const RESULT_SCHEMA: &str = include_str!("../../schema/result_record.schema.json");
