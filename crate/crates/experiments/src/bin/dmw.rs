use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dmw_experiments::{run_and_write, Config, Experiment, ExperimentError, Format};

#[derive(Parser)]
#[command(name = "dmw", version, about = "Distance-matrix Wasserstein experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML config file; omitted sections use defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
    /// Root seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Reference gap and spread of sliced DMW across orders.
    Tradeoff,
    /// Slicing error against the number of directions.
    Directions,
    /// Runtime on SBM graph metrics and against the Monte Carlo budgets.
    Scalability,
    /// MMD permutation test power on circles against ellipses.
    Twosample,
    /// Exact DMW by order on small space pairs.
    Hierarchy,
    /// Exact DMW and GW bounds on the four-point counterexample pair.
    Counterexample,
    /// Gram matrix of a TU-format graph dataset.
    KernelExport,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::Tradeoff => Experiment::Tradeoff,
            Command::Directions => Experiment::Directions,
            Command::Scalability => Experiment::Scalability,
            Command::Twosample => Experiment::TwoSample,
            Command::Hierarchy => Experiment::Hierarchy,
            Command::Counterexample => Experiment::Counterexample,
            Command::KernelExport => Experiment::KernelExport,
        }
    }
}

fn run(cli: &Cli) -> Result<Vec<PathBuf>, ExperimentError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| ExperimentError::ThreadPool(e.to_string()))?;
    }
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    run_and_write(cli.command.into(), &config, &cli.out, cli.format)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let err = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("{err}");
            ExitCode::FAILURE
        }
    }
}
