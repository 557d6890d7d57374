use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use mzs_cli::commands::{self, Format};
use mzs_cli::config::{RunConfig, Sweep};
use mzs_core::exprparse::parse_expr;
use mzs_core::propagator::SchemeKind;

#[derive(Parser)]
#[command(name = "mzs", version, about = "Magnus-Zassenhaus splittings for the semiclassical Schrödinger equation")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Scheme override: strang, mid or full.
    #[arg(long, global = true)]
    scheme: Option<SchemeKind>,
    /// Magnus order for `derive`.
    #[arg(long, global = true, default_value_t = 5, value_parser = clap::value_parser!(u32).range(3..=5))]
    order: u32,
    /// Output format for `derive`: pretty, json or latex.
    #[arg(long, global = true, default_value = "pretty")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured wave packet and write snapshots and a summary.
    Run,
    /// Error sweep over ε or h against converged references.
    Convergence {
        /// Comma-separated ε values; expressions such as 2^-5 are accepted.
        #[arg(long, conflicts_with = "h")]
        eps: Option<String>,
        /// Comma-separated step sizes at the configured ε.
        #[arg(long)]
        h: Option<String>,
    },
    /// Print the derived splitting.
    Derive,
    /// Run the symbolic and numeric self-checks.
    Verify,
    /// Compute a converged reference solution for the configured run.
    Reference,
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let e = parse_expr(s.trim()).with_context(|| format!("bad list entry {s:?}"))?;
            Ok(e.eval(0.0, 0.0)?)
        })
        .collect()
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let path = cli.config.as_ref().context("--config is required for this command")?;
    let mut cfg = commands::with_scheme(RunConfig::load(path)?, cli.scheme);
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    Ok(cfg)
}

fn real_main(cli: Cli) -> Result<bool> {
    let jobs = cli.jobs.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    match &cli.command {
        Command::Run => {
            let summary = commands::run(&load(&cli)?)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Reference => {
            let summary = commands::reference(&load(&cli)?)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Convergence { eps, h } => {
            let cfg = load(&cli)?;
            let spec = match (eps, h) {
                (Some(e), _) => Sweep::Epsilon(parse_list(e)?),
                (None, Some(h)) => Sweep::Step(parse_list(h)?),
                (None, None) => cfg.sweep.clone().context("no sweep: give --eps, --h or a \"sweep\" config entry")?,
            };
            let (csv, _) = commands::convergence(&cfg, &spec, jobs)?;
            print!("{csv}");
        }
        Command::Derive => print!("{}", commands::derive(cli.order, cli.format)?),
        Command::Verify => {
            let (table, ok) = commands::verify();
            print!("{table}");
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match real_main(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
