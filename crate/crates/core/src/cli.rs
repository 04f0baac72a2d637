//! Command-line front end: `solve`, `experiment` and `verify`.
//!
//! Exit codes are 0 on success, 1 when a checked property fails, 2 for
//! configuration or usage errors and 3 when a solver fails.

pub mod config;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::continuum::continuum_eigenvalues;
use crate::experiments::{self, analyze, ratio_records, ExperimentKind};
use crate::landscape::generalized_minima;
use crate::linalg::DEFAULT_TOL;
use crate::potential::{generate, Distribution};
use crate::{Error, Result};
use output::{OutputDir, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Environment variable capping the worker count (0 = one per core).
pub const THREADS_ENV: &str = "LANDSCAPE_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "landscape-lab", version, about = "Landscape-function laboratory for 1-D random Schrödinger operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one realization and write spectrum, landscape, minima and ratios.
    Solve(SolveArgs),
    /// Run an experiment described by a TOML file.
    Experiment(ExperimentArgs),
    /// Run the oracle and bound cross-validation corpus.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    /// Cell law: bernoulli:P_ZERO:VMAX, two-point:P:A:B or uniform:LO:HI.
    #[arg(long)]
    pub dist: String,
    /// Domain length in unit cells.
    #[arg(long = "L", value_name = "L")]
    pub len: usize,
    /// Coupling constant.
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Subdivisions per unit cell.
    #[arg(long = "M", value_name = "M", default_value_t = crate::discretize::DEFAULT_SUBDIVISIONS)]
    pub per_cell: usize,
    #[arg(long)]
    pub seed: u64,
    /// Number of eigenvalues.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Highest generalized-minima order to pair with.
    #[arg(long, default_value_t = 1)]
    pub s: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = experiments::DEFAULT_MAX_NODES)]
    pub max_nodes: usize,
    /// Also compute continuum eigenvalues and write oracle.csv.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    pub config: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = verify::DEFAULT_CORPUS_SIZE)]
    pub corpus_size: usize,
    /// Reverse one bound so the run must fail (tests the failure path).
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

fn exit_code(e: &Error) -> i32 {
    if e.is_solver_failure() {
        EXIT_SOLVER
    } else {
        EXIT_CONFIG
    }
}

fn unix_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis())
}

/// Builds the global rayon pool from `LANDSCAPE_LAB_THREADS`.
pub fn configure_threads() -> Result<()> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("{THREADS_ENV}={v} is not a worker count")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match catch_unwind(AssertUnwindSafe(|| dispatch(cli.command))) {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| panic.downcast_ref::<&str>().copied())
                .unwrap_or("unknown panic");
            eprintln!("property failure: {msg}");
            EXIT_PROPERTY
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Solve(a) => cmd_solve(&a),
        Command::Experiment(a) => cmd_experiment(&a),
        Command::Verify(a) => cmd_verify(&a),
    }
}

pub fn cmd_solve(args: &SolveArgs) -> Result<i32> {
    let started = unix_ms();
    let clock = Instant::now();
    let dist: Distribution = args.dist.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
    if args.n == 0 || args.s == 0 {
        return Err(Error::Config("--n and --s must be at least 1".into()));
    }
    let nodes = args.len.saturating_mul(args.per_cell);
    if nodes > args.max_nodes {
        return Err(Error::TooLarge {
            nodes,
            cap: args.max_nodes,
        });
    }
    let pot = generate(dist, args.len, args.k, args.seed)?;
    let a = analyze(&pot, args.per_cell, args.n, args.tol)?;
    let oracle = if args.oracle {
        Some(continuum_eigenvalues(&pot, args.n)?)
    } else {
        None
    };

    let mut records = Vec::new();
    let mut sets = Vec::new();
    let mut shortfalls = Vec::new();
    for s in 1..=args.s {
        let (r, short) = ratio_records(&pot, &a, s, oracle.as_deref(), 0.0);
        records.extend(r);
        shortfalls.extend(short);
        sets.push(generalized_minima(&a.minima, s, s * a.minima.len()));
    }

    let mut out = OutputDir::create(&args.out)?;
    out.write("spectrum.csv", &output::spectrum_csv(&a.eigenvalues))?;
    out.write("landscape.csv", &output::landscape_csv(&a.landscape))?;
    out.write("minima.csv", &output::minima_csv(&sets))?;
    out.write("ratios.csv", &output::ratios_csv(&records))?;
    if oracle.is_some() {
        out.write("oracle.csv", &output::oracle_csv(&records))?;
    }
    out.write("potential.txt", &pot.to_text())?;
    RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "solve".into(),
        config: serde_json::to_value(args).expect("arguments serialize"),
        seeds: vec![args.seed],
        started_unix_ms: started,
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
        files: out.files().to_vec(),
        notes: json!({
            "L_max": a.wells.l_max,
            "u_max": a.landscape.u_max,
            "shortfalls": shortfalls,
        }),
    }
    .write(&out)?;
    Ok(EXIT_OK)
}

pub fn cmd_experiment(args: &ExperimentArgs) -> Result<i32> {
    let started = unix_ms();
    let clock = Instant::now();
    let cfg = config::load_config(&args.config)?;
    let run = experiments::run(&cfg)?;

    let mut out = OutputDir::create(&args.out)?;
    let name = cfg.kind.name();
    out.write(&format!("{name}.csv"), &output::ratios_csv(&run.records))?;
    if cfg.oracle {
        out.write(&format!("{name}_oracle.csv"), &output::oracle_csv(&run.records))?;
    }
    match cfg.kind {
        ExperimentKind::Semiclassical => out.write(
            "semiclassical_points.csv",
            &output::semiclassical_csv(&run.semiclassical),
        )?,
        ExperimentKind::Homogenized => out.write(
            "homogenized_points.csv",
            &output::homogenized_csv(&run.homogenized),
        )?,
        _ => {}
    }
    let mut seeds = cfg.seeds.clone();
    seeds.sort_unstable();
    RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "experiment".into(),
        config: serde_json::to_value(&cfg).expect("config serializes"),
        seeds,
        started_unix_ms: started,
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
        files: out.files().to_vec(),
        notes: json!({
            "summary": run.summary,
            "ratio_band": experiments::RATIO_BAND,
            "failures": run.failures,
            "shortfalls": run.shortfalls,
        }),
    }
    .write(&out)?;
    if !run.failures.is_empty() {
        for f in &run.failures {
            eprintln!("seed {}: {}", f.seed, f.message);
        }
        return Ok(EXIT_SOLVER);
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    if args.corpus_size == 0 {
        return Err(Error::Config("--corpus-size must be at least 1".into()));
    }
    let checks = verify::run_corpus(args.corpus_size, args.inject_fault)?;
    print!("{}", verify::format_table(&checks));
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
    if failed.is_empty() {
        println!("all {} checks passed", checks.len());
        return Ok(EXIT_OK);
    }
    for c in &failed {
        eprintln!("FAILED {} for seed {}", c.name, c.seed);
    }
    Ok(EXIT_PROPERTY)
}
