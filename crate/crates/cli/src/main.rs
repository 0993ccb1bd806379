use std::process::ExitCode;

use clap::error::ErrorKind as ClapKind;
use clap::Parser;
use fermilearn_cli::{run, Args, CliError, ExperimentConfig};

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if matches!(e.kind(), ClapKind::DisplayHelp | ClapKind::DisplayVersion) => e.exit(),
        Err(e) => return fail(&CliError::config(e.to_string().trim())),
    };
    let outcome = ExperimentConfig::try_from(args).and_then(|cfg| run(&cfg));
    match outcome {
        Ok(out) if out.fixtures_failed => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}
