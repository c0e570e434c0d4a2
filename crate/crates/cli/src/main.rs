//! `tumordde`: batch front end for the tumor-immune two-delay model.

mod commands;
mod config;
mod error;
mod output;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::commands::{ContinueArgs, OutputArgs, SimulateArgs, SwitchingArgs};
use crate::config::{Format, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "tumordde",
    version,
    about = "Equilibria, delay stability, switching curves, simulation and periodic continuation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output file, relative to the output directory unless absolute.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output directory (overrides TUMORDDE_OUT_DIR and output.dir).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Common {
    fn load(&self) -> Result<(RunConfig, OutputArgs), CliError> {
        let cfg = RunConfig::load(&self.config)?;
        let out = OutputArgs {
            out: self.out.clone(),
            out_dir: self.out_dir.clone(),
            format: self.format,
        };
        Ok((cfg, out))
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List admissible equilibria with their root-case labels.
    Equilibria {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        a_threshold: Option<f64>,
    },
    /// Stability verdict of every equilibrium at the given delays.
    Stability {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tau1: Option<f64>,
        #[arg(long)]
        tau2: Option<f64>,
    },
    /// Equal-delay Hopf delays tau_c and tau_k.
    TauCritical {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        k_max: u32,
    },
    /// Stability switching curves in the (tau1, tau2) plane.
    SwitchingCurves {
        #[command(flatten)]
        common: Common,
        /// Samples per feasible interval.
        #[arg(long)]
        samples: Option<usize>,
        /// Grid size for locating the feasible set.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        s_max: Option<i32>,
        #[arg(long)]
        k_max: Option<i32>,
        #[arg(long, default_value_t = 0)]
        equilibrium_index: usize,
    },
    /// Integrate the delayed, forced system.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        tau1: Option<f64>,
        #[arg(long)]
        tau2: Option<f64>,
    },
    /// Continue an equilibrium to an omega-periodic orbit.
    ContinuePeriodic {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        /// interior or tumor-free.
        #[arg(long)]
        equilibrium: Option<String>,
        #[arg(long)]
        tau1: Option<f64>,
        #[arg(long)]
        tau2: Option<f64>,
        #[arg(long)]
        eps_max: Option<f64>,
        #[arg(long)]
        tau_max: Option<f64>,
    },
    /// Re-derive the closed-form constants and report each check.
    Validate {
        /// Also write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Equilibria {
            common,
            a_threshold,
        } => {
            let (cfg, out) = common.load()?;
            commands::equilibria(&cfg, a_threshold, &out)
        }
        Command::Stability { common, tau1, tau2 } => {
            let (cfg, out) = common.load()?;
            commands::stability(&cfg, tau1, tau2, &out)
        }
        Command::TauCritical { common, k_max } => {
            let (cfg, out) = common.load()?;
            commands::tau_critical_cmd(&cfg, k_max, &out)
        }
        Command::SwitchingCurves {
            common,
            samples,
            grid,
            s_max,
            k_max,
            equilibrium_index,
        } => {
            let (cfg, out) = common.load()?;
            let args = SwitchingArgs {
                samples,
                grid,
                s_max,
                k_max,
                equilibrium_index,
            };
            commands::switching_curves(&cfg, &args, &out)
        }
        Command::Simulate {
            common,
            t_end,
            h,
            tau1,
            tau2,
        } => {
            let (cfg, out) = common.load()?;
            commands::simulate(
                &cfg,
                &SimulateArgs {
                    t_end,
                    h,
                    tau1,
                    tau2,
                },
                &out,
            )
        }
        Command::ContinuePeriodic {
            common,
            omega,
            eps,
            equilibrium,
            tau1,
            tau2,
            eps_max,
            tau_max,
        } => {
            let (cfg, out) = common.load()?;
            let args = ContinueArgs {
                omega,
                eps,
                equilibrium,
                tau1,
                tau2,
                eps_max,
                tau_max,
            };
            commands::continue_periodic(&cfg, &args, &out)
        }
        Command::Validate { out } => {
            let checks = validate::run_checks();
            for c in &checks {
                println!("{}", c.line());
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            println!("{} checks, {failed} failed", checks.len());
            if let Some(path) = out {
                let dir = std::env::var_os(config::OUT_DIR_ENV)
                    .filter(|v| !v.is_empty())
                    .map_or_else(|| PathBuf::from("."), PathBuf::from);
                let path = output::resolve(&dir, Some(&path), "validate.json");
                let value = json!({"checks": checks, "failed": failed});
                output::write_atomic(&path, output::json_text(&value).as_bytes())?;
            }
            if failed > 0 {
                return Err(CliError::Domain(format!(
                    "{failed} validation checks failed"
                )));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
