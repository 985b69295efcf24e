//! `nrx` — BER sweep runner and deconvolution inspector.
//!
//! Exit codes: 0 success, 2 configuration error (bad flags, unreadable or
//! invalid config), 1 runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nrx_harness::{
    csv_string, decompose_report, emit_csv, parse_taps, run_demo, run_sweep, ExperimentConfig,
    HarnessError,
};

#[derive(Parser)]
#[command(
    name = "nrx",
    about = "Physical-layer receiver laboratory: neural vs LMMSE BER sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the BER/SER sweep described by a JSON config and write a CSV.
    Sweep {
        /// Experiment description (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the pole/weight form of a FIR filter's inverse.
    Decompose {
        /// Comma-separated taps, real ("1,-0.5") or complex ("1+0i,...").
        #[arg(long)]
        taps: String,
    },
    /// Run the default OFDM scenario at three SNR points and print a table.
    Demo {
        /// Master seed (default 1).
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Sweep { config, out, seed } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(seed) = seed {
                cfg.master_seed = seed;
            }
            let report = run_sweep(&cfg, true)?;
            emit_csv(&report, &out)?;
            print!("{}", csv_string(&report));
            Ok(())
        }
        Command::Decompose { taps } => {
            let taps = parse_taps(&taps)?;
            print!("{}", decompose_report(&taps)?);
            Ok(())
        }
        Command::Demo { seed } => {
            print!("{}", run_demo(seed.unwrap_or(1))?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            match e {
                HarnessError::Config(_) => ExitCode::from(2),
                HarnessError::Runtime(_) => ExitCode::from(1),
            }
        }
    }
}
