//! `contracts`: command-line driver for budgeted contract experiments.

mod commands;
mod error;
mod manifest;
mod sweep;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use budgeted_contracts::corpus::RECIPE_VERSION;
use budgeted_contracts::real::parse_real;
use budgeted_contracts::reductions::Path as ReductionPath;
use budgeted_contracts::{Execution, Objective};
use clap::{Args, Parser, Subcommand};

use commands::{CorpusFamily, DownsizeMode, GenArgs, InnerMethod, Method, Output, PofArgs};
use error::{CliError, CliResult};
use manifest::RunManifest;
use sweep::PofFamily;

#[derive(Parser, Debug)]
#[command(name = "contracts", version, about = "Budgeted multi-agent contract design experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Instance JSON file.
    #[arg(long, global = true)]
    instance: Option<PathBuf>,
    /// Output file; stdout when absent. A `<out>.manifest.json` sidecar is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for random corpora.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel sweeps (1 runs sequentially).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Recompute the outputs and compare them with the existing files instead of writing.
    #[arg(long, global = true)]
    verify: bool,
}

fn real(s: &str) -> Result<f64, String> {
    parse_real(s)
}

fn objective(s: &str) -> Result<Objective, String> {
    s.parse().map_err(|e: budgeted_contracts::ContractError| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Maximize an objective under a budget.
    Solve {
        #[arg(long, value_parser = objective, default_value = "reward")]
        objective: Objective,
        #[arg(long, value_parser = real)]
        budget: f64,
        #[arg(long, value_enum, default_value = "brute")]
        method: Method,
        #[arg(long, value_parser = real, default_value = "0.1")]
        epsilon: f64,
        /// Restrict to agents with `c_i/f({i}) ≤ 1/2`.
        #[arg(long)]
        light_only: bool,
    },
    /// Shrink a team to a fraction of its payment.
    Downsize {
        /// Comma-separated agent indices.
        #[arg(long, value_delimiter = ',', required = true)]
        set: Vec<usize>,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "submodular")]
        mode: DownsizeMode,
        /// Objective whose share is kept (submodular mode).
        #[arg(long, value_parser = objective, default_value = "reward")]
        psi: Objective,
    },
    /// Solve `from` through a solver for `to`, both given as objective@budget.
    Reduce {
        #[arg(long, value_parser = commands::parse_target)]
        from: (Objective, f64),
        #[arg(long, value_parser = commands::parse_target)]
        to: (Objective, f64),
        #[arg(long, value_enum, default_value = "brute")]
        solver: InnerMethod,
        #[arg(long, value_parser = real, default_value = "0.1")]
        epsilon: f64,
        #[arg(long, value_parser = path_kind, default_value = "xos")]
        path: ReductionPath,
    },
    /// Price of frugality over a family grid or a single instance; writes CSV.
    Pof {
        #[arg(long, value_enum)]
        family: Option<PofFamily>,
        /// `b=lo:hi:step` or `b=v1,v2,...`.
        #[arg(long, default_value = "b=0.1:0.9:0.1")]
        grid: String,
        #[arg(long = "B", value_parser = real, value_delimiter = ',', default_value = "1")]
        big_b: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "8")]
        n: Vec<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_parser = real)]
        epsilon: Option<f64>,
        #[arg(long, value_parser = objective, value_delimiter = ',', default_value = "reward")]
        objective: Vec<Objective>,
        /// Also write the `(payment, value)` step curve of every cell.
        #[arg(long)]
        emit_curve: Option<PathBuf>,
    },
    /// Write a generated instance as JSON.
    Gen {
        #[arg(long, value_enum)]
        family: Option<PofFamily>,
        /// Random corpus family, drawn with --seed and --index.
        #[arg(long, value_enum)]
        corpus: Option<CorpusFamily>,
        #[arg(long, default_value = "8")]
        n: usize,
        #[arg(long, value_parser = real)]
        b: Option<f64>,
        #[arg(long = "B", value_parser = real, default_value = "1")]
        big_b: f64,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_parser = real)]
        epsilon: Option<f64>,
        #[arg(long, default_value = "0")]
        index: u64,
    },
    /// Classify the reward and verify the objective conditions.
    Check,
}

fn path_kind(s: &str) -> Result<ReductionPath, String> {
    s.parse().map_err(|e: budgeted_contracts::ContractError| e.to_string())
}

fn execution(threads: Option<usize>) -> CliResult<Execution> {
    match threads {
        Some(0) => Err(CliError::usage("--threads must be positive")),
        Some(1) => Ok(Execution::Sequential),
        Some(t) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
            let _ = t;
            Ok(Execution::Parallel)
        }
        None => Ok(Execution::default()),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let start = Instant::now();
    let g = &cli.global;
    let exec = execution(g.threads)?;
    let load = || commands::load_instance(g.instance.as_deref());
    let output = match cli.command {
        Command::Solve { objective, budget, method, epsilon, light_only } => {
            commands::solve(load()?, &objective, budget, method, epsilon, light_only)?
        }
        Command::Downsize { set, m, mode, psi } => commands::downsize(load()?, &set, m, mode, psi)?,
        Command::Reduce { from, to, solver, epsilon, path } => {
            commands::reduce(load()?, &from, &to, solver, epsilon, path)?
        }
        Command::Pof { family, grid, big_b, n, k, epsilon, objective, emit_curve } => {
            let loaded = if g.instance.is_some() { Some(load()?) } else { None };
            let args = PofArgs {
                family,
                grid: sweep::parse_grid(&grid)?,
                big_b,
                n,
                k,
                epsilon,
                objectives: objective,
                curve: emit_curve,
            };
            commands::pof_sweep(args, loaded, exec)?
        }
        Command::Gen { family, corpus, n, b, big_b, k, epsilon, index } => {
            commands::gen(GenArgs { family, corpus, n, b, big_b, k, epsilon, index }, g.seed)?
        }
        Command::Check => commands::check(load()?)?,
    };
    if g.verify {
        verify(g.out.as_deref(), &output)
    } else {
        emit(g, output, start)
    }
}

fn emit(g: &Global, output: Output, start: Instant) -> CliResult<()> {
    let mut written = Vec::new();
    match &g.out {
        Some(path) => {
            std::fs::write(path, &output.body).map_err(|e| CliError::io(path.display(), e))?;
            written.push(path.clone());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(output.body.as_bytes()).map_err(|e| CliError::io("stdout", e))?;
        }
    }
    for (path, body) in &output.side_files {
        std::fs::write(path, body).map_err(|e| CliError::io(path.display(), e))?;
        written.push(path.clone());
    }
    let manifest = RunManifest {
        command: std::env::args().collect(),
        tool_version: env!("CARGO_PKG_VERSION"),
        recipe_version: RECIPE_VERSION,
        seed: g.seed,
        instances: output.instances,
        outputs: written.iter().map(|p| p.display().to_string()).collect(),
        wall_time_ms: start.elapsed().as_millis(),
    };
    for path in &written {
        manifest::write(path, &manifest)?;
    }
    Ok(())
}

fn compare(path: &Path, fresh: &str) -> CliResult<()> {
    let existing = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    if existing == fresh {
        return Ok(());
    }
    let line = existing
        .lines()
        .zip(fresh.lines())
        .position(|(a, b)| a != b)
        .unwrap_or_else(|| existing.lines().count().min(fresh.lines().count()))
        + 1;
    Err(CliError::Verify(format!("{} differs from the recomputation at line {line}", path.display())))
}

fn verify(out: Option<&Path>, output: &Output) -> CliResult<()> {
    let out = out.ok_or_else(|| CliError::usage("--verify needs --out naming the file to check"))?;
    compare(out, &output.body)?;
    for (path, body) in &output.side_files {
        compare(path, body)?;
    }
    eprintln!("verified {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = e.to_string().replace('\n', " ");
            eprintln!("error: {}: {line}", e.kind());
            ExitCode::from(e.exit_code())
        }
    }
}
