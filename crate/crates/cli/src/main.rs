//! `tdsusy`: verification suites, potential and transform export, and
//! Crank–Nicolson propagation.
//!
//! Exit status: 0 on success, 1 on a failed check or runtime error, 2 on a
//! usage or configuration error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tdsusy::potentials::Form;
use tdsusy::Error;

use config::GridConfig;

#[derive(Debug)]
pub enum Failure {
    /// Usage or configuration problem: exit 2.
    Config(String),
    /// Failed check or numerical error: exit 1.
    Runtime(String),
}

impl Failure {
    pub fn config(e: Error) -> Self {
        Failure::Config(e.to_string())
    }

    pub fn runtime(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }

    /// Parameter and grid problems are configuration errors; everything
    /// else is a runtime failure.
    pub fn classify(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Grid(_) | Error::Unsupported(_) | Error::Capability { .. } => Failure::config(e),
            _ => Failure::runtime(e),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "tdsusy", version, about = "Time-dependent Darboux transformations: checks and exports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Derived,
    Printed,
}

impl From<FormArg> for Form {
    fn from(f: FormArg) -> Form {
        match f {
            FormArg::Derived => Form::Derived,
            FormArg::Printed => Form::Printed,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a verification suite and report every check.
    Verify {
        #[arg(long, default_value = "all", value_parser = clap::builder::PossibleValuesParser::new(tdsusy::verify::Suite::NAMES))]
        suite: String,
        /// Replace every upper-bound tolerance of the suite.
        #[arg(long)]
        tol: Option<f64>,
        /// Write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Evaluate a closed-form potential family on a grid.
    Potential {
        /// JSON family description, e.g. {"family":"free-even-k","k":2}.
        #[arg(long, conflicts_with = "family")]
        config: Option<PathBuf>,
        /// Family name: free-even-k, free-odd-k, free-juxtaposed-n,
        /// free-evenodd-ml, oscillator-anharmonic.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long, value_enum, default_value = "derived")]
        form: FormArg,
        /// x=a:b:n,t=a:b:n
        #[arg(long, value_parser = config::parse_grid, allow_hyphen_values = true)]
        grid: GridConfig,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Export U_N, |W| and the image of a state under a Crum chain.
    Transform {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the grid of the config.
        #[arg(long, value_parser = config::parse_grid, allow_hyphen_values = true)]
        grid: Option<GridConfig>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Propagate a state with Crank–Nicolson and export snapshots.
    Propagate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { suite, tol, out, format } => commands::verify(&suite, tol, out.as_deref(), format),
        Command::Potential {
            config,
            family,
            k,
            n,
            m,
            l,
            lambda,
            omega,
            form,
            grid,
            output,
        } => commands::family_from_args(config.as_deref(), family.as_deref(), k, n, m, l, lambda, omega)
            .and_then(|f| commands::potential(f, form.into(), &grid, &output)),
        Command::Transform { config, grid, output } => commands::transform(&config, grid, &output),
        Command::Propagate { config, output } => commands::propagate(&config, &output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
