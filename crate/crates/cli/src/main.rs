use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use geomgan::GeomError;

mod commands;
mod config;

/// Generate from data geometry and align datasets with geometry-matching GANs.
#[derive(Debug, Parser)]
#[command(name = "geomgan", version)]
struct Cli {
    /// JSON config for the subcommand; unknown keys are rejected.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run seed.
    #[arg(long, global = true, env = "GEOMGAN_SEED")]
    seed: Option<u64>,
    /// Output directory; a manifest.json is written beside the outputs.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also print errors to stderr as one JSON line.
    #[arg(long, global = true)]
    json_errors: bool,
    /// Worker threads for parallel evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    XToY,
    YToX,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a Gaussian mixture; the config is the mixture spec.
    Simulate,
    /// Train an autoencoder on a CSV dataset.
    TrainAe {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        label_column: Option<String>,
    },
    /// Select k by BIC over k-means on the latent codes and export weights.
    Partition {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        manifold: PathBuf,
        #[arg(long)]
        label_column: Option<String>,
    },
    /// Train a single-domain geometry-matching GAN.
    TrainGan {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        manifold: PathBuf,
        /// Directory holding partition.csv and partition.json.
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        label_column: Option<String>,
    },
    /// Train a two-domain alignment model.
    TrainMgm {
        #[arg(long)]
        domain_x: PathBuf,
        #[arg(long)]
        domain_y: PathBuf,
        #[arg(long)]
        label_column: Option<String>,
    },
    /// Apply a saved alignment model to a dataset.
    Map {
        /// Model bundle directory.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value = "x-to-y")]
        direction: Direction,
        #[arg(long)]
        label_column: Option<String>,
    },
    /// Score a saved alignment model by nearest-neighbor label transfer.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        domain_x: PathBuf,
        #[arg(long)]
        domain_y: PathBuf,
        #[arg(long, default_value = "label")]
        label_column: String,
    },
    /// Run a named end-to-end scenario.
    Reproduce {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(geomgan::scenarios::SCENARIOS))]
        scenario: String,
    },
}

fn command_with_defaults() -> clap::Command {
    let mut cmd = Cli::command();
    for (name, defaults) in config::documented_defaults() {
        cmd = cmd.mut_subcommand(name, |c| c.after_help(format!("Config defaults:\n{defaults}")));
    }
    cmd
}

fn exit_code(e: &GeomError) -> u8 {
    if e.is_validation() {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = match command_with_defaults().try_get_matches().and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size thread pool: {e}");
        }
    }
    let json_errors = cli.json_errors;
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error: {e}");
            if json_errors {
                let line = serde_json::json!({ "error": e.to_string(), "kind": commands::kind(&e), "exit_code": code });
                eprintln!("{line}");
            }
            ExitCode::from(code)
        }
    }
}
