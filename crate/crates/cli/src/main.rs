use std::process::ExitCode;

use clap::Parser;
use ntau_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(ntau_cli::main_with(&cli))
}
