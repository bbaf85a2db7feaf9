use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser};
use dqd_cli::commands::sweep_table;
use dqd_cli::{
    execute, write_artifacts, CliError, ConfigFile, EngineName, Format, Overrides, RunConfig,
    Subcommand,
};

/// Dissipative dynamics of a double-quantum-dot charge qubit.
#[derive(Parser)]
#[command(name = "simulate", version)]
enum Cli {
    /// Tabulate the bath spectral density J(ω) on a grid.
    Spectral(Common),
    /// Reduced density matrix trajectory for one parameter point.
    Evolve(Common),
    /// Decay rate and decoherence times for one parameter point.
    T2(Common),
    /// Decoherence times over a parameter sweep.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    engine: Option<EngineName>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn main() -> ExitCode {
    let (subcommand, args) = match Cli::parse() {
        Cli::Spectral(a) => (Subcommand::Spectral, a),
        Cli::Evolve(a) => (Subcommand::Evolve, a),
        Cli::T2(a) => (Subcommand::T2, a),
        Cli::Sweep(a) => (Subcommand::Sweep, a),
    };
    let mut resolved = None;
    let result = ConfigFile::load(&args.config)
        .and_then(|file| {
            let overrides = Overrides {
                out: args.out,
                engine: args.engine,
                format: args.format,
            };
            RunConfig::resolve(subcommand, file, overrides)
        })
        .and_then(|run| {
            let artifacts = execute(&run);
            resolved = Some(run);
            artifacts
        })
        .and_then(|artifacts| write_artifacts(&artifacts));

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if let (CliError::Core(dqd_core::Error::SweepPoint { completed, .. }), Some(run)) =
                (&err, &resolved)
            {
                if !completed.is_empty() {
                    eprintln!("completed points:");
                    eprint!("{}", sweep_table(run, completed).to_csv());
                }
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
