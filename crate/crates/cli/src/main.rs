//! `copa`: match debate motions to classes of principled arguments.

mod commands;
mod config;
mod failure;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use copa_core::kb::Stance;

use config::{AppConfig, Overrides};
use failure::{Failure, Outcome};

#[derive(Parser, Debug)]
#[command(
    name = "copa",
    version,
    about = "Match debate motions to classes of principled arguments"
)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, env = "COPA_CONFIG")]
    config: Option<PathBuf>,

    /// Leave the general CoPAs out of rankings and evaluation.
    #[arg(long, global = true)]
    exclude_general: bool,

    /// Method tag (ba, knn, w2v, nb, lr) or `ensemble`.
    #[arg(long, global = true)]
    method: Option<String>,

    /// Minimum score reported by `match`.
    #[arg(long, global = true, default_value_t = 0.5)]
    threshold: f64,

    /// Output directory; `eval` requires it, `features` writes there when set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dataset statistics and largest-CoPA baselines as JSON.
    Stats,
    /// Rank CoPAs for a new motion and instantiate their claims.
    Match {
        #[arg(long)]
        action: String,
        #[arg(long)]
        topic: String,
    },
    /// Print a three-line syllogism for a motion, CoPA and stance.
    Invent {
        #[arg(long)]
        action: String,
        #[arg(long)]
        topic: String,
        /// CoPA id or name.
        #[arg(long)]
        copa: String,
        #[arg(long, default_value = "pro")]
        stance: Stance,
        /// Replace the generic minor premise.
        #[arg(long)]
        minor: Option<String>,
        /// Subject and modal of the conclusion, e.g. "humanity must".
        #[arg(long)]
        lead: Option<String>,
    },
    /// Dump the pair features of every (motion, CoPA) as CSV.
    Features,
    /// Leave-one-out evaluation: curve CSVs and a summary JSON.
    Eval,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}

fn run(cli: Cli) -> Outcome<()> {
    let env: BTreeMap<String, String> = std::env::vars().filter(|(k, _)| k.starts_with("COPA_")).collect();
    let overrides = Overrides {
        exclude_general: cli.exclude_general,
        method: cli.method.clone(),
    };
    let cfg = AppConfig::load(cli.config.as_deref(), &env, &overrides)?;
    match cli.command {
        Command::Stats => emit(&commands::stats(&cfg)?),
        Command::Match { action, topic } => {
            let method = cli.method.as_deref().unwrap_or("ensemble");
            emit(&commands::matching(&cfg, &action, &topic, method, cli.threshold)?)
        }
        Command::Invent {
            action,
            topic,
            copa,
            stance,
            minor,
            lead,
        } => emit(&commands::invent(
            &cfg,
            commands::InventArgs {
                action: &action,
                topic: &topic,
                copa: &copa,
                stance,
                minor,
                lead,
            },
        )?),
        Command::Features => {
            let csv = commands::features(&cfg)?;
            match &cli.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
                    let path = dir.join("features.csv");
                    std::fs::write(&path, csv).map_err(|e| Failure::io(&path, e))
                }
                None => emit(&csv),
            }
        }
        Command::Eval => {
            let dir = cli
                .out
                .as_deref()
                .ok_or_else(|| Failure::config("eval needs --out DIR"))?;
            for path in commands::evaluate(&cfg, dir)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn emit(text: &str) -> Outcome<()> {
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(text.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| Failure::io(std::path::Path::new("<stdout>"), e))
}
