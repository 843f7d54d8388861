//! `qpexas`: QPE-sampling spectra, error-detected runs and spectrum comparison.

mod commands;
mod config;
mod error;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use config::{CommonArgs, RunConfig};
use error::CliResult;

#[derive(Parser, Debug)]
#[command(name = "qpexas", version, about = "QPE-sampling absorption spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analytic outcome law and post-processed spectrum.
    Spectrum(CommonArgs),
    /// Finite-shot statevector QPE, optionally noisy or with a single ancilla.
    Simulate(CommonArgs),
    /// Dynamic QPE with and without Iceberg error detection.
    Qed(CommonArgs),
    /// Fit the two-qubit error rate to discard fractions.
    FitDiscard {
        /// Discard table with `cumulative_n2q` and `discard_rate` columns.
        table: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// ℓ² error between two spectrum CSVs.
    Compare { a: PathBuf, b: PathBuf },
}

fn run(cli: Cli) -> CliResult<()> {
    let written = match cli.command {
        Command::Spectrum(c) => commands::spectrum(&RunConfig::resolve(&c)?)?,
        Command::Simulate(c) => commands::simulate(&RunConfig::resolve(&c)?)?,
        Command::Qed(c) => commands::qed(&RunConfig::resolve(&c)?)?,
        Command::FitDiscard { table, common } => {
            commands::fit_discard(&RunConfig::resolve(&common)?, table.as_deref())?
        }
        Command::Compare { a, b } => {
            println!("{:.12e}", commands::compare(&a, &b)?);
            return Ok(());
        }
    };
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
