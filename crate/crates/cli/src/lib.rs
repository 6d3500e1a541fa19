//! Command line and HTTP front ends for the synthesizer.

pub mod http;

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use provsynth_core::abstraction::PrunerKind;
use provsynth_core::eval::{eval, eval_prov};
use provsynth_core::harness::{generate_suite, load_suite, report_csv, run_suite, save_benchmark, summary};
use provsynth_core::query::OpKind;
use provsynth_core::synth::{synthesize, SearchOrder, SynthConfig};
use provsynth_core::{Database, DemoGrid, Query, Table};

#[derive(Debug, Parser)]
#[command(name = "provsynth", version, about = "Synthesize analytical SQL from computation demonstrations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for queries consistent with a demonstration.
    Synth(SynthArgs),
    /// Evaluate a query given as JSON.
    Eval(EvalArgs),
    /// Run every benchmark under a directory and write a CSV report.
    Bench(BenchArgs),
    /// Write the generated benchmark suite to a directory.
    Generate(GenerateArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Input table as `id=path.csv`; repeatable.
    #[arg(long = "table", value_name = "ID=CSV", required = true)]
    pub tables: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub tables: TableArgs,
    /// Demonstration grid as JSON.
    #[arg(long)]
    pub demo: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[arg(long, default_value_t = 10)]
    pub limit: usize,
    /// Seconds.
    #[arg(long, default_value_t = 600.0)]
    pub timeout: f64,
    #[arg(long, default_value = "provenance")]
    pub pruner: PrunerKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `skeleton` or `global`.
    #[arg(long, default_value = "skeleton")]
    pub order: SearchOrder,
    /// Comma-separated operators; all by default.
    #[arg(long, value_delimiter = ',')]
    pub ops: Vec<OpKind>,
    /// Print the full report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub tables: TableArgs,
    #[arg(long)]
    pub query: PathBuf,
    /// Print provenance expressions instead of values.
    #[arg(long)]
    pub prov: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated pruners.
    #[arg(long, value_delimiter = ',', default_value = "provenance")]
    pub pruners: Vec<PrunerKind>,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[arg(long, default_value_t = 10)]
    pub limit: usize,
    #[arg(long, default_value_t = 600.0)]
    pub timeout: f64,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: String,
    /// Syntheses allowed to run at once; defaults to the number of CPUs.
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Exit status of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// The search finished without a solution.
    NoSolution,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::NoSolution => 2,
        }
    }
}

/// Parses `id=path`.
pub fn parse_table_arg(arg: &str) -> anyhow::Result<(String, PathBuf)> {
    match arg.split_once('=') {
        Some((id, path)) if !id.is_empty() && !path.is_empty() => Ok((id.to_string(), PathBuf::from(path))),
        _ => bail!("expected --table ID=PATH, got `{arg}`"),
    }
}

pub fn load_tables(args: &TableArgs) -> anyhow::Result<Database> {
    let mut db = Database::new();
    for arg in &args.tables {
        let (id, path) = parse_table_arg(arg)?;
        let table = Table::load_csv(&id, &path).with_context(|| format!("loading {}", path.display()))?;
        db.insert(table);
    }
    Ok(db)
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

impl SynthArgs {
    pub fn config(&self) -> SynthConfig {
        let mut config = SynthConfig {
            depth: self.depth,
            limit: self.limit,
            timeout: self.timeout,
            pruner: self.pruner,
            seed: self.seed,
            order: self.order,
            ..Default::default()
        };
        if !self.ops.is_empty() {
            config.operators = self.ops.clone();
        }
        config
    }
}

pub fn run_synth(args: &SynthArgs, out: &mut dyn Write) -> anyhow::Result<Status> {
    let db = load_tables(&args.tables)?;
    let demo = DemoGrid::parse_json(&read(&args.demo)?).context("parsing the demonstration")?;
    demo.check_refs(&db)?;
    let report = synthesize(&db, &demo, &args.config())?;
    if args.json {
        writeln!(out, "{}", report.to_json())?;
    } else {
        for s in &report.solutions {
            writeln!(out, "-- #{} {}\n{};\n", s.rank, s.query, s.sql)?;
        }
        let note = if report.timed_out { ", timed out" } else { "" };
        eprintln!(
            "{} solutions, {} queries visited, {} pruned{note}",
            report.solutions.len(),
            report.queries_visited,
            report.queries_pruned
        );
    }
    Ok(if report.solutions.is_empty() { Status::NoSolution } else { Status::Ok })
}

pub fn run_eval(args: &EvalArgs, out: &mut dyn Write) -> anyhow::Result<Status> {
    let db = load_tables(&args.tables)?;
    let query = Query::parse_json(&read(&args.query)?).context("parsing the query")?;
    query.check_scope(&db)?;
    if args.prov {
        write!(out, "{}", eval_prov(&query, &db)?.to_csv())?;
    } else {
        write!(out, "{}", eval(&query, &db)?.to_csv())?;
    }
    Ok(Status::Ok)
}

pub fn run_bench(args: &BenchArgs, out: &mut dyn Write) -> anyhow::Result<Status> {
    let suite = load_suite(&args.dir)?;
    if suite.is_empty() {
        bail!("no benchmarks under {}", args.dir.display());
    }
    let config = SynthConfig {
        depth: args.depth,
        limit: args.limit,
        timeout: args.timeout,
        ..Default::default()
    };
    config.validate()?;
    let rows = run_suite(&suite, &args.pruners, &config);
    std::fs::write(&args.out, report_csv(&rows)).with_context(|| format!("writing {}", args.out.display()))?;
    write!(out, "{}", summary(&rows))?;
    Ok(Status::Ok)
}

pub fn run_generate(args: &GenerateArgs, out: &mut dyn Write) -> anyhow::Result<Status> {
    let suite = generate_suite(args.seed)?;
    for b in &suite {
        save_benchmark(b, &args.out)?;
    }
    writeln!(out, "wrote {} benchmarks to {}", suite.len(), args.out.display())?;
    Ok(Status::Ok)
}

/// Runs a parsed command. Errors are input errors (exit 1).
pub fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<Status> {
    match cli.command {
        Command::Synth(a) => run_synth(&a, out),
        Command::Eval(a) => run_eval(&a, out),
        Command::Bench(a) => run_bench(&a, out),
        Command::Generate(a) => run_generate(&a, out),
        Command::Serve(a) => {
            let workers = a.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            if workers == 0 {
                return Err(anyhow!("--workers must be at least 1"));
            }
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(http::serve(&a.addr, workers))?;
            Ok(Status::Ok)
        }
    }
}
