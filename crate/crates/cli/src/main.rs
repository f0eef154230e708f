//! `mhd`: validate parameter regimes, run levels, run the oracle suite and
//! inspect checkpoints.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use mhd_core::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mhd",
    version,
    about = "Convex-integration iterates for 3D ideal MHD"
)]
struct Cli {
    /// Run every kernel on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the regime inequality table and the resolution audit.
    Validate { config: PathBuf },
    /// Build levels 0..=q_max, or continue a checkpoint.
    Run {
        config: PathBuf,
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// One step from a checkpoint directory.
    Step {
        config: PathBuf,
        checkpoint: PathBuf,
    },
    /// Run the oracle suite; one line per oracle.
    Oracles { config: Option<PathBuf> },
    /// Print the frame tables and geometric constants.
    DumpTables,
    /// Diagnostics CSV for a checkpoint directory, on stdout.
    Diagnose { checkpoint: PathBuf },
}

/// 1 usage, 2 regime failure, 3 internal.
fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::Config(_) | Error::InvalidGrid(_) => 1,
        Error::ScaleOverflow { .. }
        | Error::InsufficientPadding { .. }
        | Error::NonIntegralRLambda(_)
        | Error::Unresolved { .. }
        | Error::TooFewSlices { .. }
        | Error::OutOfBall { .. } => 2,
        _ => 3,
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("MHD_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("MHD_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("MHD_THREADS must be positive".into());
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(m) = configure_threads() {
        eprintln!("mhd: {m}");
        return ExitCode::from(1);
    }
    mhd_core::par::set_sequential(cli.sequential);
    let out = match cli.command {
        Command::Validate { config } => commands::validate(&config),
        Command::Run { config, resume } => commands::run(&config, resume.as_deref()),
        Command::Step { config, checkpoint } => commands::step(&config, &checkpoint),
        Command::Oracles { config } => commands::oracles(config.as_deref()),
        Command::DumpTables => commands::dump_tables(),
        Command::Diagnose { checkpoint } => commands::diagnose(&checkpoint),
    };
    match out {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("mhd: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
