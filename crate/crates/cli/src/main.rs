use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::{Deserialize, Serialize};

mod commands;
mod config;

use config::{load_config, merge, CliError};

#[derive(Debug, Parser)]
#[command(name = "tpop", version, about = "Tree proof-of-position experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Global {
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,

    /// Output directory.
    #[arg(long, global = true, default_value = "results")]
    pub out: PathBuf,

    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// JSON file of option values; command-line flags take precedence.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte-Carlo confusion counts over a (p_h, p_c) grid.
    Sweep(commands::SweepArgs),
    /// Theoretical TP/TN surfaces and expected-edge grid.
    Model(commands::ModelArgs),
    /// Compare a simulated surface against a model surface.
    Compare(commands::CompareArgs),
    /// Platoon-attack expected edges and honest-edge optima.
    Platoon(commands::PlatoonArgs),
    /// Fraction of random trees holding distinct agents.
    Uniqueness(commands::UniquenessArgs),
}

fn run() -> Result<(), CliError> {
    let matches = Cli::command().get_matches();
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    let file = match &cli.global.config {
        Some(path) => load_config(path)?,
        None => Default::default(),
    };
    let mut global = merge(&cli.global, &matches, &file)?;
    global.config = cli.global.config.clone();
    let sub = |name: &str| -> &ArgMatches { matches.subcommand_matches(name).expect("matched subcommand") };
    let jobs = global.jobs;
    if jobs == Some(0) {
        return Err(CliError::Validation("--jobs must be positive".into()));
    }
    tpop_core::simulator::with_jobs(jobs, || match &cli.command {
        Command::Sweep(a) => commands::sweep(&global, &merge(a, sub("sweep"), &file)?),
        Command::Model(a) => commands::model(&global, &merge(a, sub("model"), &file)?),
        Command::Compare(a) => commands::compare(&merge(a, sub("compare"), &file)?),
        Command::Platoon(a) => commands::platoon(&global, &merge(a, sub("platoon"), &file)?),
        Command::Uniqueness(a) => commands::uniqueness(&global, &merge(a, sub("uniqueness"), &file)?),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TPOP_LOG", "warn")).init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
