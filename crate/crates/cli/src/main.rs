use clap::Parser;
use greenfn_cli::args::{Cli, Command};
use greenfn_cli::commands;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Constants(args) => commands::cmd_constants(args).map(|()| true),
        Command::Green(args) => commands::cmd_green(args).map(|()| true),
        Command::Asymptote(args) => commands::cmd_asymptote(args).map(|()| true),
        Command::Oracle(args) => commands::cmd_oracle(args).map(|()| true),
        Command::Verify(args) => commands::cmd_verify(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
