use std::process::ExitCode;

use clap::Parser;

use metriforge_cli::{run, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = match &cli.command {
        metriforge_cli::Command::Classify(a) => a.common.json,
        metriforge_cli::Command::Axioms(a) | metriforge_cli::Command::Topology(a) => a.common.json,
        metriforge_cli::Command::Probe(a) => a.common.json,
        metriforge_cli::Command::Demo(a) => a.common.json,
    };
    match run(cli) {
        Ok(outcome) => {
            if json {
                println!("{}", outcome.report.to_json());
            } else {
                print!("{}", outcome.report.to_text());
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
