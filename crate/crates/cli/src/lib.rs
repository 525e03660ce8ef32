// SPDX-License-Identifier: Apache-2.0

//! Command-line driver: config loading, subcommands and exit statuses.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod error;

pub use config::{Overrides, RunConfig, Target};
pub use error::{exit, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "nvamp",
    version,
    about = "NV center coupled to a squeezed superconducting loop"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Lowest three levels of the full and quartic Hamiltonians versus flux (CSV).
    Spectrum,
    /// Analytic vs Trotterized squeezing propagator entries versus time (CSV).
    Trotter,
    /// Coupling gain versus flux for several E_L/E_J (CSV).
    Amplify,
    /// Bare spin-loop coupling report (JSON).
    Coupling,
    /// Invariant suite (JSON); nonzero exit on any failure.
    Selftest,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// TOML config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Fock truncation dimension.
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Use the 2pi phase convention for the amplification sweep.
    #[arg(long = "two-pi", global = true)]
    pub two_pi: bool,
    #[arg(long = "fs-min", global = true)]
    pub fs_min: Option<f64>,
    #[arg(long = "fs-max", global = true)]
    pub fs_max: Option<f64>,
    #[arg(long = "fs-steps", global = true)]
    pub fs_steps: Option<usize>,
    /// Comma-separated E_L/E_J values.
    #[arg(long, global = true, value_delimiter = ',')]
    pub ratios: Option<Vec<f64>>,
    /// Time in ns (sweep time for amplify, final time for trotter).
    #[arg(long, global = true)]
    pub t: Option<f64>,
    /// Trotter steps.
    #[arg(long = "M", global = true)]
    pub m: Option<usize>,
    /// Conjugation branch index.
    #[arg(long, global = true)]
    pub k: Option<usize>,
}

impl Flags {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            dim: self.dim,
            two_pi: self.two_pi,
            fs_min: self.fs_min,
            fs_max: self.fs_max,
            fs_steps: self.fs_steps,
            ratios: self.ratios.clone(),
            t: self.t,
            m: self.m,
            k: self.k,
            out: self.out.clone(),
        }
    }
}

impl Command {
    pub fn target(self) -> Target {
        match self {
            Command::Spectrum => Target::Spectrum,
            Command::Trotter => Target::Trotter,
            Command::Amplify => Target::Amplify,
            Command::Coupling | Command::Selftest => Target::Other,
        }
    }
}

/// Text produced by a command and the number of failed checks it reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub failures: usize,
}

/// Loads and validates the configuration for `cli`.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.flags.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply(&cli.flags.overrides(), cli.command.target());
    cfg.validate()?;
    Ok(cfg)
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Output, CliError> {
    let text = match command {
        Command::Spectrum => commands::cmd_spectrum(cfg)?,
        Command::Trotter => commands::cmd_trotter(cfg)?,
        Command::Amplify => commands::cmd_amplify(cfg)?,
        Command::Coupling => commands::cmd_coupling(cfg)?,
        Command::Selftest => {
            let (text, failures) = commands::cmd_selftest(cfg)?;
            return Ok(Output { text, failures });
        }
    };
    Ok(Output { text, failures: 0 })
}

/// Runs `cli`, writes the output and returns the process exit status.
pub fn run(cli: &Cli) -> i32 {
    let result = resolve_config(cli).and_then(|cfg| {
        let out = execute(cli.command, &cfg)?;
        match &cfg.output.path {
            Some(p) => std::fs::write(p, &out.text)?,
            None => print!("{}", out.text),
        }
        if out.failures > 0 {
            return Err(CliError::Invariant {
                failed: out.failures,
            });
        }
        Ok(())
    });
    match result {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
