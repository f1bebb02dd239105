//! Batch front end over the Gaussian-evolution library: scenario configs in,
//! CSV time series and JSON reports out.

pub mod config;
pub mod error;
pub mod fit;
pub mod output;
pub mod report;
pub mod scenario;
pub mod sweep;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Parser)]
#[command(name = "phaseflow", about = "Gaussian phase-space evolution and reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario configuration file (TOML)
    config: PathBuf,
    /// Directory for CSV and report output
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Override the scenario tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Override ħ
    #[arg(long)]
    hbar: Option<f64>,
    /// Suppress the summary line on stdout
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its time series and report
    Run(CommonArgs),
    /// Run a scenario once per value of a swept parameter
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Dotted path of the numeric config leaf to vary
        #[arg(long)]
        param: String,
        /// Comma list ("0.1,0.2") or inclusive range ("0.1:1.0:10")
        #[arg(long)]
        values: String,
    },
    /// Parse and validate a configuration without running it
    Check(CommonArgs),
}

fn load_config(common: &CommonArgs) -> Result<(String, config::ScenarioConfig), CliError> {
    let text = std::fs::read_to_string(&common.config)?;
    let mut cfg = config::parse_config(&text)?;
    if let Some(tol) = common.tol {
        cfg.scenario.tol = tol;
    }
    if let Some(hbar) = common.hbar {
        cfg.scenario.hbar = hbar;
    }
    Ok((text, cfg))
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run(common) => {
            let (_, cfg) = load_config(&common)?;
            let report = scenario::run_scenario(&cfg, &common.out_dir)?;
            if !common.quiet {
                println!(
                    "{}: {} ({} checks, {:.3}s){}",
                    report.scenario,
                    if report.passed { "ok" } else { "FAILED" },
                    report.checks.len(),
                    report.wall_time_s,
                    if report.warnings.is_empty() {
                        String::new()
                    } else {
                        format!(", {} warnings", report.warnings.len())
                    }
                );
            }
            Ok(if report.passed { 0 } else { 1 })
        }
        Command::Sweep { common, param, values } => {
            let (text, cfg) = load_config(&common)?;
            // overrides apply through the re-parsed text, so reject mixing
            if common.tol.is_some() || common.hbar.is_some() {
                return Err(CliError::Config(
                    "sweep: set tol/hbar in the config file, not via flags".into(),
                ));
            }
            let vals = sweep::parse_values(&values)?;
            let (headers, rows) = sweep::run_sweep(&text, &param, &vals, &common.out_dir)?;
            if !common.quiet {
                println!(
                    "{}: swept {} over {} values ({} output columns)",
                    cfg.scenario.id,
                    param,
                    rows.len(),
                    headers.len() - 1
                );
            }
            Ok(0)
        }
        Command::Check(common) => {
            let (_, cfg) = load_config(&common)?;
            if !common.quiet {
                println!("{}: config ok ({})", cfg.scenario.id, cfg.scenario.kind.as_str());
            }
            Ok(0)
        }
    }
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
