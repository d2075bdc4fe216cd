//! `sta`: design and verify shortcuts to adiabaticity from the command line.
//!
//! Every subcommand prints a JSON report (or, with `--format csv`, its main
//! table) on stdout and writes its data files under `--out-dir`. Exit codes:
//! 0 on success, 2 for bad input, 3 when the numerics fail.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cmd;
mod io;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::{CliError, CliResult, Format, OutDir, Tolerances};

#[derive(Parser, Debug)]
#[command(name = "sta", version, about = "Shortcuts to adiabaticity and their scattering duals")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Relative and absolute tolerance of the ODE integrators.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,
    /// Directory for output files; created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// What goes to stdout: the JSON report or the main CSV table.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bogoliubov coefficients and Ermakov fit of a profile.
    Analyze(cmd::analyze::Opts),
    /// Engineer an unexciting profile from a reference amplitude.
    Design(cmd::design::Opts),
    /// Append a second stage that undoes a profile's excitation.
    Complete(cmd::complete::Opts),
    /// Reflection and transmission of a potential.
    Scatter(cmd::scatter::Opts),
    /// Reflectionless profile from Kay-Moses bound-state data.
    Synth(cmd::synth::Opts),
    /// Squeeze, rotate, unsqueeze the vacuum.
    Squeeze(cmd::squeeze::Opts),
    /// Compare |beta|^2 with R/T of the dual potential.
    VerifyDuality(cmd::duality::Opts),
}

/// Validated global settings handed to each subcommand.
pub struct Run {
    pub tol: f64,
    pub out: OutDir,
    pub format: Format,
}

impl Run {
    pub fn tolerances(&self, slab: f64) -> Tolerances {
        Tolerances::new(self.tol, slab)
    }

    pub fn mode_options(&self) -> sta_core::ModeOptions {
        sta_core::ModeOptions::with_tolerance(self.tol)
    }

    pub fn ermakov_options(&self) -> sta_core::ErmakovOptions {
        sta_core::ErmakovOptions { policy: sta_core::ode::StepPolicy::with_tolerance(self.tol), ..Default::default() }
    }
}

pub fn positive(name: &str, x: f64) -> CliResult<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Input(format!("--{name} must be positive and finite, got {x}")))
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let tol = positive("tol", cli.global.tol)?;
    let prepare = || OutDir::prepare(&cli.global.out_dir);
    let run = |out| Run { tol, out, format: cli.global.format };
    match cli.command {
        Command::Analyze(o) => cmd::analyze::run(o.validate()?, &run(prepare()?)),
        Command::Design(o) => cmd::design::run(o.validate()?, &run(prepare()?)),
        Command::Complete(o) => cmd::complete::run(o.validate()?, &run(prepare()?)),
        Command::Scatter(o) => cmd::scatter::run(o.validate()?, &run(prepare()?)),
        Command::Synth(o) => cmd::synth::run(o.validate()?, &run(prepare()?)),
        Command::Squeeze(o) => cmd::squeeze::run(o.validate()?, &run(prepare()?)),
        Command::VerifyDuality(o) => cmd::duality::run(o.validate()?, &run(prepare()?)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
