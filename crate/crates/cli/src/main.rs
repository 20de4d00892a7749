use std::process::ExitCode;

use clap::Parser;

use cbrw_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("cbrw: error: {e:#}");
            ExitCode::from(1)
        }
    }
}
