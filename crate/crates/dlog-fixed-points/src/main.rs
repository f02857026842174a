//! `dlfp` — count fixed points of the discrete logarithm over prime
//! ranges, tally the error distribution, and verify the proved bounds.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use dlog_fixed_points::experiment::ExperimentConfig;
use dlog_fixed_points::harness::{
    cmd_compute, cmd_report, cmd_simulate, cmd_stats, cmd_tally, cmd_verify, AppError,
};

#[derive(Parser)]
#[command(
    name = "dlfp",
    version,
    about = "Fixed points of the discrete logarithm: exact counts, error tallies, bound checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count fixed points over a prime range and write results.csv
    Compute(RunArgs),
    /// Bucket log_p|delta| into the three tables with plots, from results.csv
    Tally(RunArgs),
    /// Grouped statistics and chi-squared goodness of fit, from results.csv
    Stats(RunArgs),
    /// Recount and re-check every proved bound plus the exceedance scan
    Verify(RunArgs),
    /// Exact heuristic-model moments next to a Monte Carlo estimate
    Simulate(SimulateArgs),
    /// tally + stats + verify in one pass
    Report(RunArgs),
}

#[derive(Args, Default)]
struct RunArgs {
    /// Lower end of the prime range, inclusive (default 3)
    #[arg(long)]
    from: Option<u64>,
    /// Upper end of the prime range, inclusive (default 15413)
    #[arg(long)]
    to: Option<u64>,
    /// Worker threads (default: machine parallelism)
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory holding results.csv, tables and plots (default "out")
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exceedance-scan threshold exponent offset (default 0.1)
    #[arg(long)]
    epsilon: Option<f64>,
    /// Monte Carlo trials (default 100000)
    #[arg(long)]
    trials: Option<u64>,
    /// Monte Carlo seed (default 42)
    #[arg(long)]
    seed: Option<u64>,
    /// Largest prime cross-checked against the brute-force oracle (default 211)
    #[arg(long)]
    oracle_limit: Option<u64>,
    /// Optional TOML config file; command-line flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// The prime to simulate
    p: u64,
    /// Monte Carlo trials (default 100000)
    #[arg(long)]
    trials: Option<u64>,
    /// Monte Carlo seed (default 42)
    #[arg(long)]
    seed: Option<u64>,
    /// Optional TOML config file; command-line flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

/// The optional config-file schema: every field mirrors a flag.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    from: Option<u64>,
    to: Option<u64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
    epsilon: Option<f64>,
    trials: Option<u64>,
    seed: Option<u64>,
    oracle_limit: Option<u64>,
}

fn load_file_config(path: Option<&PathBuf>) -> Result<FileConfig, AppError> {
    match path {
        None => Ok(FileConfig::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                AppError::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            toml::from_str(&text)
                .map_err(|e| AppError::Usage(format!("bad config {}: {e}", path.display())))
        }
    }
}

fn resolve_config(args: &RunArgs) -> Result<ExperimentConfig, AppError> {
    let file = load_file_config(args.config.as_ref())?;
    let defaults = ExperimentConfig::default();
    Ok(ExperimentConfig {
        prime_lo: args.from.or(file.from).unwrap_or(defaults.prime_lo),
        prime_hi: args.to.or(file.to).unwrap_or(defaults.prime_hi),
        workers: args.workers.or(file.workers).unwrap_or(defaults.workers),
        oracle_limit: args.oracle_limit.or(file.oracle_limit).unwrap_or(defaults.oracle_limit),
        epsilon: args.epsilon.or(file.epsilon).unwrap_or(defaults.epsilon),
        trials: args.trials.or(file.trials).unwrap_or(defaults.trials),
        seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
        output_dir: args.out.clone().or(file.out).unwrap_or(defaults.output_dir),
    })
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Compute(args) => cmd_compute(&resolve_config(&args)?).map(|_| ()),
        Command::Tally(args) => cmd_tally(&resolve_config(&args)?).map(|_| ()),
        Command::Stats(args) => cmd_stats(&resolve_config(&args)?),
        Command::Verify(args) => cmd_verify(&resolve_config(&args)?).map(|_| ()),
        Command::Simulate(args) => {
            let file = load_file_config(args.config.as_ref())?;
            let defaults = ExperimentConfig::default();
            let trials = args.trials.or(file.trials).unwrap_or(defaults.trials);
            let seed = args.seed.or(file.seed).unwrap_or(defaults.seed);
            cmd_simulate(args.p, trials, seed)
        }
        Command::Report(args) => cmd_report(&resolve_config(&args)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                // --help and --version are not usage errors
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
