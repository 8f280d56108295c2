//! Command line front end for the converter model and the modulation
//! optimization pipeline.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 when a validation or
//! selection check fails, 3 on runtime failures (I/O, malformed files,
//! infeasible commands).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "heps",
    about = "Dual active bridge modulation design tool",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    /// TOML run configuration; defaults apply for every omitted field.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for generated artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub(crate) enum Command {
    /// Print the series inductance sizing bound for an envelope.
    DesignLr {
        #[arg(long, default_value_t = 200.0)]
        v1: f64,
        #[arg(long, default_value_t = 1.0)]
        n: f64,
        #[arg(long, default_value_t = 160.0)]
        v2_min: f64,
        #[arg(long, default_value_t = 20e3)]
        fs: f64,
        #[arg(long, default_value_t = 1000.0)]
        p_max: f64,
    },

    /// Solve one operating point and write its waveforms to CSV.
    Waveform {
        /// Strategy code: 0 narrows the primary, 1 the secondary.
        #[arg(long, default_value_t = 0)]
        strategy: u8,
        #[arg(long, default_value_t = 1.0)]
        din: f64,
        /// Output voltage (V).
        #[arg(long, default_value_t = 200.0)]
        v2: f64,
        /// Commanded power (W); the outer shift is solved from it.
        #[arg(long, default_value_t = 1000.0)]
        power: f64,
        /// Samples per period.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },

    /// Sweep the full dataset grid and write it to CSV.
    GenData,

    /// Train both surrogate models from a dataset CSV.
    Train {
        /// Dataset produced by gen-data; defaults to <out>/dataset.csv.
        #[arg(long)]
        dataset: Option<PathBuf>,
    },

    /// Optimize modulation maps with the exact converter model.
    DirectMap,

    /// Optimize modulation maps with the trained surrogates.
    Optimize {
        /// Directory holding loss_model.json and zvs_model.json; defaults
        /// to the output directory.
        #[arg(long)]
        models: Option<PathBuf>,
    },

    /// Pick strategy and inner shift for one operating point from a map.
    Select {
        /// Map CSV; defaults to <out>/map_direct.csv.
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long)]
        power: f64,
        #[arg(long)]
        v2: f64,
    },

    /// Cross-check the waveform solver, harmonics and closed forms.
    Validate,

    /// Write summary tables: optimized shifts, soft-switching windows and
    /// efficiency slices.
    Report,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, anything else is a
            // usage error.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    match commands::run(cli.command, cli.config, cli.seed, cli.out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::CliError::ChecksFailed) => ExitCode::from(2),
        Err(commands::CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
