//! Benchmark harness CLI: seeded ensembles over the circuit families with
//! CSV output, aggregation, the analytic bond-dimension model, the X-entry
//! frequency formula, and a parser check for `.mqc` files.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stn_sim::bench::{
    expected_chi_model, expected_chi_model_mc, rows_from_csv, rows_to_csv, run_experiment,
    summarize, summary_table, x_probability, x_probability_f64, ExperimentConfig, Family, Method,
};
use stn_sim::circuits::{parse_circuit, CczDecomposition};
use stn_sim::mast::ProjectionSchedule;
use stn_sim::mps::TruncationPolicy;

#[derive(Parser)]
#[command(
    name = "stn-bench",
    version,
    about = "stabilizer tensor network benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded ensemble and write one CSV row per instance.
    Run(RunArgs),
    /// Aggregate CSV files into mean/median/p95/max bond dimension per group.
    Summarize(SummarizeArgs),
    /// Evaluate the expected peak bond-dimension model.
    Model(ModelArgs),
    /// Print the X-or-Y entry probability 2^{n-1}/(2^n - 1).
    Xprob(XprobArgs),
    /// Parse a circuit file and report its gate counts.
    ParseCheck(ParseCheckArgs),
}

#[derive(Args)]
struct RunArgs {
    /// tdoped | uudagger | hiddenshift
    #[arg(long)]
    family: String,
    /// mast | stn
    #[arg(long)]
    method: String,
    /// Data-qubit count.
    #[arg(long)]
    n: usize,
    /// T-gate layers (tdoped / uudagger).
    #[arg(long, default_value_t = 0)]
    t: usize,
    /// Per-oracle CCZ count (hiddenshift).
    #[arg(long, default_value_t = 0)]
    ccz: usize,
    #[arg(long, default_value_t = 200)]
    instances: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// left-to-right | right-to-left | middle-out-pairwise
    #[arg(long, default_value = "left-to-right")]
    schedule: String,
    /// Bond-dimension cap (unbounded when omitted).
    #[arg(long)]
    chi_max: Option<usize>,
    /// SVD cutoff; singular values below it are discarded.
    #[arg(long, default_value_t = 1e-12)]
    cutoff: f64,
    /// CCZ realization for hiddenshift: four-t | seven-t
    #[arg(long, default_value = "four-t")]
    ccz_decomp: String,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SummarizeArgs {
    /// CSV files produced by `run`.
    paths: Vec<PathBuf>,
    /// Output path for the plain-text table (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    t: usize,
    /// Also evaluate the model by Monte-Carlo with this many samples.
    #[arg(long)]
    mc: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct XprobArgs {
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct ParseCheckArgs {
    path: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

enum CliError {
    Config(String),
    Runtime(String),
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(args) => {
            let family = Family::parse(&args.family).map_err(config_err)?;
            let method = Method::parse(&args.method).map_err(config_err)?;
            let schedule = ProjectionSchedule::parse(&args.schedule).map_err(config_err)?;
            let ccz_decomposition = match args.ccz_decomp.as_str() {
                "four-t" => CczDecomposition::FourT,
                "seven-t" => CczDecomposition::SevenT,
                other => {
                    return Err(CliError::Config(format!(
                        "unknown ccz decomposition '{other}'"
                    )))
                }
            };
            let t = match family {
                Family::HiddenShift => args.ccz,
                _ => args.t,
            };
            let policy = TruncationPolicy {
                chi_max: args.chi_max,
                svd_cutoff: args.cutoff,
            };
            let config = ExperimentConfig {
                family,
                method,
                n: args.n,
                t,
                instances: args.instances,
                seed: args.seed,
                schedule,
                policy,
                ccz_decomposition,
            };
            config.validate().map_err(config_err)?;
            let rows = run_experiment(&config).map_err(runtime_err)?;
            let csv = rows_to_csv(&rows);
            write_output(args.out.as_deref(), &csv)?;
            let table = summary_table(&summarize(&rows));
            eprint!("{table}");
            Ok(())
        }
        Command::Summarize(args) => {
            if args.paths.is_empty() {
                return Err(CliError::Config("no csv paths given".into()));
            }
            let mut rows = Vec::new();
            for path in &args.paths {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| runtime_err(format!("{}: {e}", path.display())))?;
                rows.extend(rows_from_csv(&text).map_err(config_err)?);
            }
            let table = summary_table(&summarize(&rows));
            write_output(args.out.as_deref(), &table)
        }
        Command::Model(args) => {
            let closed = expected_chi_model(args.n, args.t);
            println!("expected_peak_chi {closed}");
            if let Some(samples) = args.mc {
                let mc = expected_chi_model_mc(args.n, args.t, samples, args.seed);
                println!("expected_peak_chi_mc {mc}");
            }
            Ok(())
        }
        Command::Xprob(args) => {
            let (num, den) = x_probability(args.n).map_err(config_err)?;
            println!("{num}/{den} = {}", x_probability_f64(args.n));
            Ok(())
        }
        Command::ParseCheck(args) => {
            let text = std::fs::read_to_string(&args.path)
                .map_err(|e| runtime_err(format!("{}: {e}", args.path.display())))?;
            let circuit = parse_circuit(&text).map_err(config_err)?;
            println!(
                "ok: {} qubits, {} gates, {} non-clifford, {} measurements",
                circuit.n,
                circuit.gates.len(),
                circuit.count_non_clifford(),
                circuit.count_measurements()
            );
            Ok(())
        }
    }
}

fn write_output(path: Option<&std::path::Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| runtime_err(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
