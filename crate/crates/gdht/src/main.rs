use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gdht::cli::{run, Invocation};
use gdht::config::Command;

/// Joint sparse regression and precision estimation by gradient descent
/// with hard thresholding.
#[derive(Parser)]
#[command(name = "gdht", version, about)]
struct Args {
    /// One of: generate, init, fit, error-curve, scaling, compare, ar1-fit.
    command: String,
    /// Configuration file (may be empty; defaults are documented).
    #[arg(long)]
    config: PathBuf,
    /// Override as section.key=value, applied after the file; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let Some(command) = Command::from_name(&args.command) else {
        eprintln!(
            "error: InvalidValue unknown command '{}'; expected one of generate, init, fit, \
error-curve, scaling, compare, ar1-fit",
            args.command
        );
        return ExitCode::from(2);
    };
    let invocation = Invocation {
        command,
        config: args.config,
        overrides: args.set,
        out: args.out,
    };
    match run(&invocation) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
