mod commands;
mod config;

use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use commands::Outcome;
use config::{Cli, Command, RunConfig};

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = match &cli.command {
        Command::Build(a) | Command::Verify(a) => RunConfig::from_family(a)?,
        Command::Search(a) => RunConfig::from_search(a)?,
        Command::Tables(a) => RunConfig::from_tables(a)?,
    };
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    match &cli.command {
        Command::Build(_) => commands::cmd_build(&cfg),
        Command::Verify(_) => commands::cmd_verify(&cfg),
        Command::Search(_) => commands::cmd_search(&cfg),
        Command::Tables(_) => commands::cmd_tables(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
