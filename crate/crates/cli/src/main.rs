use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use ckbrownian_cli::commands::{cmd_ensemble, cmd_simulate, cmd_verify};
use ckbrownian_cli::config::{parse_config, RunConfig};
use ckbrownian_cli::CliError;

#[derive(Parser)]
#[command(
    name = "ckbrownian",
    version,
    about = "Damped free-particle quantum simulator: single runs, noise ensembles, verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one packet under a single force realization
    Simulate {
        /// Run configuration file (flat key = value)
        #[arg(long)]
        config: PathBuf,
        /// Directory for the CSV and manifest artifacts
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Overrides the config seed
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config engine: analytic, solver, or both
        #[arg(long)]
        engine: Option<String>,
    },
    /// Average many seeded noise realizations and write spread statistics
    Ensemble {
        /// Run configuration file (flat key = value)
        #[arg(long)]
        config: PathBuf,
        /// Directory for the CSV and manifest artifacts
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Overrides the config seed
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config engine: analytic, solver, or both
        #[arg(long)]
        engine: Option<String>,
    },
    /// Run the built-in correctness suite; nonzero exit on any failure
    Verify {
        /// Directory for the JSON report (stdout table is always printed)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path, seed: Option<u64>, engine: Option<String>) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = parse_config(&text).map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(engine) = engine {
        cfg.engine = engine.parse().map_err(CliError::Config)?;
    }
    Ok(cfg)
}

/// Honors CKBROWNIAN_THREADS before any parallel region starts; unset means
/// the machine default.
fn init_threads() -> Result<(), String> {
    let raw = match std::env::var("CKBROWNIAN_THREADS") {
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(e) => return Err(format!("CKBROWNIAN_THREADS: {e}")),
        Ok(raw) => raw,
    };
    let workers: usize = raw
        .parse()
        .map_err(|_| format!("CKBROWNIAN_THREADS must be a positive integer, got '{raw}'"))?;
    if workers == 0 {
        return Err("CKBROWNIAN_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| format!("thread pool: {e}"))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate {
            config,
            out,
            seed,
            engine,
        } => {
            let cfg = load(&config, seed, engine)?;
            for file in cmd_simulate(&cfg, &out)? {
                println!("wrote {}", file.display());
            }
            Ok(())
        }
        Command::Ensemble {
            config,
            out,
            seed,
            engine,
        } => {
            let cfg = load(&config, seed, engine)?;
            for file in cmd_ensemble(&cfg, &out)? {
                println!("wrote {}", file.display());
            }
            Ok(())
        }
        Command::Verify { out } => cmd_verify(out.as_deref()),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        std::process::exit(2);
    }
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
