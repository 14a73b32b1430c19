use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = cli::Cli::parse();
    let outcome = cli::run(&cli);
    for line in &outcome.lines {
        println!("{line}");
    }
    ExitCode::from(outcome.code)
}
