mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zzc_core::{Error, PrecisionConfig};

use crate::commands::{BoundArgs, ComputeArgs, OptimizeArgs, TableArgs, VerifyArgs};
use crate::output::Format;

const EXIT_FAIL: u8 = 1;
const EXIT_CONSTRAINT: u8 = 2;
const EXIT_PRECISION: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;

/// Explicit constants for the zero-counting formula of Dedekind zeta functions.
#[derive(Parser)]
#[command(name = "zzc", version)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "human", global = true)]
    format: Format,
    /// Working precision in decimal digits.
    #[arg(long, env = "ZZC_DIGITS", default_value_t = 50, global = true)]
    digits: u32,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Constants (C1, C2, C3) and their breakdown for one parameter point.
    Compute(ComputeArgs),
    /// Recompute the published tables and compare cell by cell.
    Table(TableArgs),
    /// Error bound and zero-count window for a number field.
    Bound(BoundArgs),
    /// Search the parameter region for better constants.
    Optimize(OptimizeArgs),
    /// Run the self-verification suite.
    Verify(VerifyArgs),
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_) => EXIT_USAGE,
        Error::Precision(_) => EXIT_PRECISION,
        Error::Domain(_) | Error::Constraint(_) | Error::Search(_) => EXIT_CONSTRAINT,
    }
}

fn report_error(err: &Error) {
    eprintln!("error: {err}");
    if let Error::Constraint(violations) = err {
        for v in violations {
            eprintln!("  [{}] {v}", v.code());
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let prec = match PrecisionConfig::with_digits(cli.digits) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_PRECISION);
        }
    };
    let result = match &cli.command {
        Command::Compute(a) => commands::compute(a, &prec),
        Command::Table(a) => commands::table(a, &prec),
        Command::Bound(a) => commands::bound(a, &prec),
        Command::Optimize(a) => commands::optimize(a, &prec),
        Command::Verify(a) => commands::verify(a, &prec),
    };
    let output = match result {
        Ok(o) => o,
        Err(e) => {
            report_error(&e);
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = output.render(cli.format);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| format!("cannot write to stdout: {e}")),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_IO);
    }
    if output.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
