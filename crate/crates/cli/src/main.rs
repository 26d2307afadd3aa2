//! `qys`: single runs, tip shooting, regime sweeps, oracle self-tests and the
//! regime table.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Family;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<qys_core::Error> for CliError {
    fn from(e: qys_core::Error) -> Self {
        use qys_core::Error::*;
        match e {
            InvalidParams(_) | InvalidConfig(_) | NonPositiveRbar(_) | DegenerateInterval(_)
            | Io { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qys", version, about = "Quasi-Yamabe gradient soliton ODE laboratory")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory. Without it results go to stdout only.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub rtol: Option<f64>,
    #[arg(long, global = true)]
    pub atol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct ParamArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rbar: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one line-mode trajectory.
    Run {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true)]
        psi: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        dpsi: Option<f64>,
        #[arg(long = "F", allow_hyphen_values = true)]
        potential: Option<f64>,
    },
    /// Shoot from the tip of a rotationally symmetric candidate.
    Shoot {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long = "F0", allow_hyphen_values = true)]
        f0: Option<f64>,
        #[arg(long)]
        r_end: Option<f64>,
    },
    /// Run a grid of line and tip runs and write a JSONL report.
    Sweep,
    /// Check the integrator against a closed-form family.
    Oracle {
        #[arg(long, value_enum)]
        family: Option<Family>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        c1: Option<f64>,
        #[arg(long)]
        span: Option<f64>,
    },
    /// Print the regime table with citations.
    Table,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("QYS_LOG"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qys: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
