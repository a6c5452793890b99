use std::io::Write;
use std::process::ExitCode;

use ci_cli::{execute, Cli, CliError, EXIT_BUDGET, EXIT_INPUT};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = ci_core::par::with_threads(cli.common.threads, || execute(&cli));
    let out = match result {
        Ok(out) => out,
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            return ExitCode::from(code);
        }
    };
    let written = match &cli.common.out {
        Some(path) => std::fs::write(path, &out.text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(out.text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_INPUT);
    }
    if out.incomplete {
        eprintln!("warning: optimizer stopped before convergence");
        return ExitCode::from(EXIT_BUDGET);
    }
    ExitCode::SUCCESS
}
