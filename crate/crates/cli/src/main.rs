//! `dfsdca`: run experiments, generate data, compute reference optima and
//! summarize run logs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dfsdca_core::experiment::load_data;
use dfsdca_core::io::csv::parse_run_log;
use dfsdca_core::io::libsvm::write_libsvm;
use dfsdca_core::io::synth::{gen_synthetic_pca, gen_synthetic_ridge};
use dfsdca_core::{reference_solution, run_experiment, Engine, Error, ExperimentConfig, RunLog};

/// Gap (or suboptimality, when no gap is logged) used by `report`.
const REPORT_TARGET: f64 = 1e-4;

#[derive(Parser)]
#[command(name = "dfsdca", version, about = "Distributed dual-free SDCA experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file and write its CSV log.
    Run(RunArgs),
    /// Generate a synthetic dataset in LIBSVM format.
    GenData(GenArgs),
    /// Compute the exact optimum w* for a config's data and loss.
    SolveRef(SolveRefArgs),
    /// Summarize a run log CSV.
    Report { csv: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Overrides the config seed (sampling and straggler timing).
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the CSV output path.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    /// Writes the simulator event trace to this path.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Deterministic,
    Threaded,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: DataKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    /// Label noise of the ridge data.
    #[arg(long, default_value_t = 0.1)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum DataKind {
    Pca,
    Ridge,
}

#[derive(Args)]
struct SolveRefArgs {
    config: PathBuf,
    /// File for w*, one value per line; printed to stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn load_config(path: &Path) -> Result<ExperimentConfig, Error> {
    ExperimentConfig::load(path).map_err(|e| match e {
        // an unreadable config is a configuration problem, not a data problem
        Error::Io { path, source } => Error::Config(format!("{}: {source}", path.display())),
        other => other,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn run(args: RunArgs) -> Result<(), Error> {
    let mut cfg = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.set_seed(seed);
    }
    if let Some(out) = args.output {
        cfg.output_path = out;
    }
    if let Some(engine) = args.engine {
        cfg.engine = match engine {
            EngineArg::Deterministic => Engine::Deterministic,
            EngineArg::Threaded => Engine::Threaded,
        };
    }
    if args.trace.is_some() {
        cfg.trace_path = args.trace;
    }
    let out = run_experiment(&cfg)?;
    let last = out.log.last().expect("initial snapshot");
    let mut line = format!("{} snapshots written to {}", out.log.records.len(), cfg.output_path.display());
    if let Some(g) = last.duality_gap {
        write!(line, "; final gap {g:e}").unwrap();
    }
    if let Some(s) = last.suboptimality {
        write!(line, "; final suboptimality {s:e}").unwrap();
    }
    if let Some(eta) = out.eta {
        write!(line, "; eta {eta:e}").unwrap();
    }
    if let Some(tau) = out.tau {
        write!(line, "; tau {tau}").unwrap();
    }
    if let Some(d) = &out.delays {
        write!(line, "; max delay {}", d.max_delay()).unwrap();
    }
    println!("{line}");
    Ok(())
}

fn gen_data(args: GenArgs) -> Result<(), Error> {
    let data = match args.kind {
        // the loss parameters do not affect the rows
        DataKind::Pca => gen_synthetic_pca(args.n, args.d, 1.0, 1.0, args.seed)?.0,
        DataKind::Ridge => gen_synthetic_ridge(args.n, args.d, args.noise, args.seed)?.0,
    };
    write_libsvm(&args.output, &data)?;
    println!("{} rows of dimension {} written to {}", data.n(), data.dim(), args.output.display());
    Ok(())
}

fn solve_ref(args: SolveRefArgs) -> Result<(), Error> {
    let cfg = load_config(&args.config)?;
    let (data, model) = load_data(&cfg)?;
    let reference = reference_solution(&data, &model, cfg.lambda)?;
    let text: String = reference.w_star.iter().map(|v| format!("{v:?}\n")).collect();
    match args.output {
        Some(path) => {
            write_text(&path, &text)?;
            eprintln!(
                "P(w*) = {:?}, |grad P(w*)| = {:e}, w* written to {}",
                reference.p_star,
                reference.grad_norm,
                path.display()
            );
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn summary(log: &RunLog) -> String {
    let Some(last) = log.last() else {
        return "empty run log\n".into();
    };
    let has_gap = last.duality_gap.is_some();
    let (name, metric): (&str, fn(&dfsdca_core::RunRecord) -> Option<f64>) = if has_gap {
        ("gap", |r| r.duality_gap)
    } else {
        ("suboptimality", |r| r.suboptimality)
    };
    let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:e}"));
    let mut out = String::new();
    writeln!(out, "snapshots: {}", log.records.len()).unwrap();
    writeln!(out, "final epochs: {}", last.epochs_equiv).unwrap();
    writeln!(out, "final gap: {}", fmt(last.duality_gap)).unwrap();
    writeln!(out, "final suboptimality: {}", fmt(last.suboptimality)).unwrap();
    let reached = log.epochs_to(REPORT_TARGET, metric);
    writeln!(
        out,
        "epochs to {name} {REPORT_TARGET:e}: {}",
        reached.map_or("not reached".to_string(), |e| e.to_string())
    )
    .unwrap();
    let max_delay = log.records.iter().map(|r| r.max_delay).max().unwrap_or(0);
    writeln!(out, "max delay: {max_delay}").unwrap();
    out
}

fn report(path: &Path) -> Result<(), Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    print!("{}", summary(&parse_run_log(&text)?));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::GenData(args) => gen_data(args),
        Command::SolveRef(args) => solve_ref(args),
        Command::Report { csv } => report(&csv),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
