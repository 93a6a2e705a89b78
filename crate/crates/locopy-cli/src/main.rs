//! Command line front end: every run prints one JSON report on stdout and
//! exits 0 on a pass verdict, 1 on any other verdict, and 2 on usage or
//! input errors.

mod commands;
mod formats;

use std::io::{self, Write};

use clap::{Parser, Subcommand};

/// Verifier for local copying and one-way discrimination of canonical
/// maximally entangled qudit state families.
#[derive(Parser, Debug)]
#[command(name = "locopy", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a canonical family admits a local copying machine.
    CheckCopiable(commands::CheckCopiableArgs),
    /// Run the copying protocol and report per-member fidelities.
    SimulateCopy(commands::SimulateCopyArgs),
    /// Test a canonical family for a shared Schmidt basis pair.
    CheckSsd(commands::CheckSsdArgs),
    /// Run one-way transfer-and-measure discrimination on a family.
    Discriminate(commands::DiscriminateArgs),
    /// Check that the copier equations only admit diagonal solutions.
    VerifyDiagonality(commands::VerifyDiagonalityArgs),
    /// Check the separable-measurement response bound.
    PovmBound(commands::PovmBoundArgs),
    /// Enumerate every copiable canonical subset up to a size limit.
    Search(commands::SearchArgs),
}

fn main() {
    let cli = Cli::parse();
    let (result, json_out) = match &cli.command {
        Command::CheckCopiable(a) => (commands::run_check_copiable(a), a.common.json_out.clone()),
        Command::SimulateCopy(a) => (commands::run_simulate_copy(a), a.common.json_out.clone()),
        Command::CheckSsd(a) => (commands::run_check_ssd(a), a.common.json_out.clone()),
        Command::Discriminate(a) => (commands::run_discriminate(a), a.common.json_out.clone()),
        Command::VerifyDiagonality(a) => {
            (commands::run_verify_diagonality(a), a.common.json_out.clone())
        }
        Command::PovmBound(a) => (commands::run_povm_bound(a), a.common.json_out.clone()),
        Command::Search(a) => (commands::run_search(a), a.common.json_out.clone()),
    };
    match result {
        Ok(report) => {
            let json =
                serde_json::to_string_pretty(&report).expect("report serialization cannot fail");
            // A consumer closing the pipe early (head, jq -e) is not an
            // error; any other stdout failure is.
            if let Err(e) = writeln!(io::stdout().lock(), "{json}") {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("error: writing report to stdout: {e}");
                    std::process::exit(2);
                }
            }
            if let Some(path) = json_out {
                if let Err(e) = std::fs::write(&path, format!("{json}\n")) {
                    eprintln!("error: writing {}: {e}", path.display());
                    std::process::exit(2);
                }
            }
            std::process::exit(report.exit_code());
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}
