use std::process::ExitCode;

use clap::Parser;
use dihom_cli::{run, AnalysisConfig};

fn main() -> ExitCode {
    let config = AnalysisConfig::parse();
    match run(&config) {
        Ok(outcome) => {
            print!("{}", outcome.output);
            ExitCode::from(outcome.status)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
