//! `hausdorff`: command-line front end for hausdorff-core.
//!
//! Exit codes: 0 when the computation succeeded (and any check verified),
//! 1 when a mathematical violation was found (the witness is on stdout),
//! 2 on usage or numerical failure.

mod commands;
mod input;
mod output;

use std::process::ExitCode;

use clap::Parser;
use hausdorff_core::config::PRECISION_ENV;
use hausdorff_core::ScalarKind;

use crate::commands::Command;
use crate::output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "hausdorff",
    version,
    about = "Completely monotone sequences and the Hausdorff moment problem"
)]
pub struct Cli {
    /// Arithmetic for sequence inputs and rational parameters.
    #[arg(long, global = true, env = PRECISION_ENV, default_value = "exact", value_parser = parse_kind)]
    pub precision: ScalarKind,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Float tolerance for verdicts; default 1e-12 * max(1, max |c_j|).
    #[arg(long, global = true, value_parser = input::real)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_kind(s: &str) -> Result<ScalarKind, String> {
    s.parse().map_err(|e: hausdorff_core::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            println!("{}", out.render(cli.format));
            if out.violation {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
