//! Command-line front end: `qrecoil <command> [--config FILE] [--set k=v]... [--out DIR]`.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 a validation
//! check failed, 3 numerical or I/O failure.

mod commands;
mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

pub use commands::{Check, Outcome, ValidationReport, FIGURE_CUTOFFS};
pub use config::{RunConfig, WindowSetting};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Friction kernel from the density and from the discretized bath
    Kernel,
    /// Normal-mode frequencies and weights
    Modes,
    /// VACF, filtered VACF and ISF exponents
    Correlate,
    /// Complex intermediate scattering function
    Isf,
    /// Dynamic structure factor
    Dsf,
    /// Cross-route residual report
    Validate,
    /// Closed-form recoil functions for a cutoff sweep
    Figure1,
    /// Imaginary part of the recoil factor for the same sweep
    Figure2,
}

#[derive(Debug, Parser)]
#[command(name = "qrecoil", version, about = "Quantum ISF and recoil for a particle coupled to a harmonic bath")]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Configuration file with `key = value` lines
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one configuration key (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory, overriding `output_dir`
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn build_config(args: &Args) -> crate::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    for s in &args.set {
        cfg.assign(s)?;
    }
    if let Some(dir) = &args.out {
        cfg.output_dir = dir.clone();
    }
    Ok(cfg)
}

pub fn execute(command: Command, cfg: RunConfig, out: &mut dyn Write) -> crate::Result<Outcome> {
    let mut ctx = commands::Context::new(cfg, out)?;
    match command {
        Command::Kernel => ctx.kernel(),
        Command::Modes => ctx.modes(),
        Command::Correlate => ctx.correlate(),
        Command::Isf => ctx.isf(),
        Command::Dsf => ctx.dsf(),
        Command::Validate => ctx.validate(),
        Command::Figure1 => ctx.figure1(),
        Command::Figure2 => ctx.figure2(),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match build_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(args.command, cfg, &mut lock) {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::ValidationFailed) => {
            eprintln!("validation failed");
            EXIT_VALIDATION
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
