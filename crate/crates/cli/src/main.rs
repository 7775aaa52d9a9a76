use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use attrcs_core::exact::PruneMask;
use attrcs_core::extensions::SizeBounds;
use attrcs_core::harness::{
    exit_code, run_bench, run_query_files, BenchConfig, GenConfig, Mode, QueryConfig, ResultRecord,
    RunOptions, EXIT_CONFIG, EXIT_OK, EXIT_PARSE,
};
use attrcs_core::par::Execution;
use attrcs_core::{Error, Model};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "attrcs", version, about = "Attributed community search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Answer one query and print its result record as JSON.
    Query(QueryArgs),
    /// Run a query set over a configuration grid and emit a CSV report.
    Bench {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write a seeded synthetic fixture (edges, attributes, queries).
    Gen {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    attrs: Option<PathBuf>,
    #[arg(long)]
    types: Option<PathBuf>,
    #[arg(long)]
    q: String,
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value = "sea")]
    mode: Mode,
    #[arg(long, default_value = "core")]
    model: Model,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 0.02)]
    e: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    beta: f64,
    #[arg(long, default_value_t = 0.2)]
    lambda: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// BLB subsample count.
    #[arg(long)]
    s: Option<usize>,
    /// Bootstrap resamples per subsample.
    #[arg(long)]
    r: Option<usize>,
    /// BLB subsample size exponent.
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    max_rounds: Option<usize>,
    #[arg(long, value_name = "L,H")]
    size_bound: Option<SizeBounds>,
    #[arg(long, value_name = "SPEC")]
    metapath: Option<String>,
    #[arg(long, default_value = "P1,P2,P3")]
    prune_mask: PruneMask,
    #[arg(long)]
    max_states: Option<u64>,
    #[arg(long)]
    time_limit_ms: Option<u64>,
    /// Include per-stage wall-clock timings in the record.
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl QueryArgs {
    fn config(&self) -> QueryConfig {
        let d = QueryConfig::default();
        QueryConfig {
            mode: self.mode,
            model: self.model,
            k: self.k,
            gamma: self.gamma,
            e: self.e,
            alpha: self.alpha,
            epsilon: self.epsilon,
            beta: self.beta,
            lambda: self.lambda,
            seed: self.seed,
            s: self.s.unwrap_or(d.s),
            r: self.r.unwrap_or(d.r),
            m: self.m.unwrap_or(d.m),
            max_rounds: self.max_rounds.unwrap_or(d.max_rounds),
            size_bound: self.size_bound,
            metapath: self.metapath.clone(),
            prune_mask: self.prune_mask.to_string(),
            max_states: self.max_states,
            time_limit_ms: self.time_limit_ms,
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n")),
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{text}")
        }
    }
}

fn query(args: QueryArgs) -> i32 {
    let config = args.config();
    let options = RunOptions {
        execution: Execution::default(),
        timings: args.timings,
    };
    let record = run_query_files(
        &args.edges,
        args.attrs.as_deref(),
        args.types.as_deref(),
        &args.q,
        &config,
        &options,
    )
    .unwrap_or_else(|err| ResultRecord::from_error(&args.q, &config, &err));
    if let Some(detail) = record
        .detail
        .as_deref()
        .filter(|_| record.exit_code() != EXIT_OK)
    {
        log::warn!("{detail}");
    }
    if let Err(err) = emit(args.out.as_deref(), &record.to_json()) {
        eprintln!("attrcs: cannot write result: {err}");
        return exit_code(&Error::Io(err));
    }
    record.exit_code()
}

fn bench(path: &Path) -> Result<(), Error> {
    let config = BenchConfig::load(path)?;
    let report = run_bench(&config, Execution::default())?;
    if let Some(path) = &config.records {
        let mut lines = String::new();
        for (label, records) in &report.records {
            for r in records {
                match r {
                    Ok(r) => lines.push_str(&r.to_json()),
                    Err(e) => lines
                        .push_str(&serde_json::json!({ "config": label, "error": e }).to_string()),
                }
                lines.push('\n');
            }
        }
        fs::write(path, lines)?;
    }
    match &config.out {
        Some(path) => report.write_csv(fs::File::create(path)?),
        None => report.write_csv(io::stdout().lock()),
    }
}

fn gen(path: &Path) -> Result<(), Error> {
    let config = GenConfig::load(path)?;
    let fixture = config.generate()?;
    fixture.write(&config.out)?;
    log::info!(
        "wrote {} nodes, {} edges, {} queries to {}",
        fixture.graph.node_count(),
        fixture.graph.edge_count(),
        fixture.queries.len(),
        config.out.display()
    );
    Ok(())
}

fn init_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("ATTRCS_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::Config(format!(
            "ATTRCS_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                ErrorKind::InvalidValue | ErrorKind::ValueValidation => EXIT_CONFIG,
                _ => EXIT_PARSE,
            } as u8);
        }
    };
    if let Err(err) = init_threads() {
        eprintln!("attrcs: {err}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    let code = match cli.command {
        Command::Query(args) => query(args),
        Command::Bench { config } => report(bench(&config)),
        Command::Gen { config } => report(gen(&config)),
    };
    ExitCode::from(code as u8)
}

fn report(result: Result<(), Error>) -> i32 {
    match result {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("attrcs: {} ({})", err, err.reason());
            exit_code(&err)
        }
    }
}
