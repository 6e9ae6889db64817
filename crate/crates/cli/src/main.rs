//! `mtlab`: constants, moment designs, bubble sweeps and concentration
//! profiles from the command line.
//!
//! Exit status: 0 success (or a valid design), 1 completed but not valid,
//! 2 error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "mtlab", version, about = "Sharp Moser-Trudinger constants, moment designs and bubble test functions on spheres")]
struct Cli {
    /// JSON file with any of the flag values; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a_{s,n} and alpha_{s,n}.
    Constants(RunConfig),
    /// Build, check or search for moment designs.
    Design {
        #[command(subcommand)]
        action: DesignAction,
    },
    /// Run the corrected bubble construction over a list of eps values.
    Sweep(RunConfig),
    /// Attribute the normalized bubble measure to its centers.
    Concentrate(RunConfig),
}

#[derive(Subcommand)]
enum DesignAction {
    /// The n+2 vertices of a regular simplex.
    Simplex(RunConfig),
    /// Recompute the residual of a design file.
    Verify(RunConfig),
    /// Look for a degree-2 infeasibility certificate for the points of a file.
    Certify(RunConfig),
    /// Multi-start numerical search.
    Search(RunConfig),
}

/// Outcome of a command that ran to completion.
pub enum Status {
    Ok,
    NotValid,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let base = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        },
        None => RunConfig::default(),
    };
    let result = match &cli.command {
        Command::Constants(flags) => commands::constants(&base.overridden_by(flags)),
        Command::Design { action } => match action {
            DesignAction::Simplex(flags) => commands::design_simplex(&base.overridden_by(flags)),
            DesignAction::Verify(flags) => commands::design_verify(&base.overridden_by(flags)),
            DesignAction::Certify(flags) => commands::design_certify(&base.overridden_by(flags)),
            DesignAction::Search(flags) => commands::design_search(&base.overridden_by(flags)),
        },
        Command::Sweep(flags) => commands::sweep(&base.overridden_by(flags)),
        Command::Concentrate(flags) => commands::concentrate(&base.overridden_by(flags)),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::NotValid) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
