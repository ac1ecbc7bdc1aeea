use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gvqkd_cli::{
    cmd_attack_demo, cmd_fringe_scan, cmd_transmit, load_config, CliError, RunConfig, EXIT_ALARM,
    EXIT_USAGE,
};
use gvqkd_core::{AttackStrategy, Decision};

/// Orthogonal-state QKD simulator.
#[derive(Debug, Parser)]
#[command(name = "gvqkd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the `seed` key.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Clean transmission runs with QBER and timing statistics.
    Transmit(Common),
    /// Delay-line scan and sine fit of the interference fringes.
    FringeScan(Common),
    /// One session under an eavesdropping strategy, with the verdict.
    AttackDemo {
        #[command(flatten)]
        common: Common,
        /// none, which-path or store-forward; overrides the `attack` key.
        #[arg(long)]
        attack: Option<String>,
        /// Exit with status 3 when any alarm is raised.
        #[arg(long)]
        fail_on_alarm: bool,
    },
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let config = load_config(&common.config)?;
    Ok(match common.seed {
        Some(seed) => config.with_seed(seed),
        None => config,
    })
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Transmit(common) => {
            let config = load(&common)?;
            let summary = cmd_transmit(&config, &common.out)?;
            println!(
                "transmit: {} runs, qber {} ± {}, anomaly fraction {}",
                summary.runs,
                fmt_opt(summary.qber),
                fmt_opt(summary.qber_sigma),
                fmt_opt(summary.anomaly_fraction),
            );
            Ok(0)
        }
        Command::FringeScan(common) => {
            let config = load(&common)?;
            for fit in cmd_fringe_scan(&config, &common.out)? {
                println!(
                    "fringe-scan {}: V_D0 {:.4}, V_D1 {:.4}, phase offset {:.4} rad",
                    fit.source, fit.visibility_d0, fit.visibility_d1, fit.phase_offset_rad
                );
            }
            Ok(0)
        }
        Command::AttackDemo {
            common,
            attack,
            fail_on_alarm,
        } => {
            let config = load(&common)?;
            let strategy = match attack {
                Some(name) => AttackStrategy::from_name(&name, config.extra_delay)?,
                None => config.attack,
            };
            let report = cmd_attack_demo(&config, &strategy, &common.out)?;
            println!(
                "attack-demo {}: qber {}, anomaly fraction {:.4}, eve information {:.4} bits, decision {:?}",
                report.strategy,
                fmt_opt(report.qber),
                report.anomaly_fraction,
                report.eve_information_bits,
                report.decision
            );
            if fail_on_alarm && report.decision != Decision::Clean {
                return Ok(EXIT_ALARM as u8);
            }
            Ok(0)
        }
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".to_string(), |v| format!("{v:.4}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
