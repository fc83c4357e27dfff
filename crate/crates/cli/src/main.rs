use std::process::ExitCode;

use clap::Parser;

use cheeger_gap_cli::cli::{Cli, Command};
use cheeger_gap_cli::commands;
use cheeger_gap_cli::config::RunConfig;

// Exit codes: 0 success, 1 verification failure, 2 input or validation
// error, 3 numerical non-convergence. Clap's own parse errors also exit
// with 2, so every malformed invocation lands in the same bucket.
fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_numerical() { 3 } else { 2 })
        }
    }
}

fn dispatch(cli: &Cli) -> cheeger_gap::Result<u8> {
    match &cli.command {
        Command::Gap(args) => {
            let cfg = RunConfig::resolve(&args.common)?;
            commands::gap::run(&args.model.required()?, &cfg)?;
            Ok(0)
        }
        Command::Bounds(args) => {
            let cfg = RunConfig::resolve(&args.common)?;
            commands::bounds::run(&args.model.required()?, &cfg)?;
            Ok(0)
        }
        Command::Sweep(args) => {
            commands::sweep::run(args)?;
            Ok(0)
        }
        Command::Verify(args) => commands::verify::run_command(args),
        Command::ExportGraph(args) => {
            let cfg = RunConfig::resolve(&args.common)?;
            commands::export::graph(&args.model.required()?, &cfg)?;
            Ok(0)
        }
        Command::ExportNetwork(args) => {
            commands::export::network(args)?;
            Ok(0)
        }
    }
}
