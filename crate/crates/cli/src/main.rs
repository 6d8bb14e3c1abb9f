//! `spl`: command-line front end.
//!
//! Exit codes: 0 success, 1 bad arguments, 2 range/capacity/resource errors,
//! 3 a verification that did not hold.

mod args;
mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use spl_core::Error;

use args::Cli;
use commands::{dispatch, Context, Failure};

fn exit_code(failure: &Failure) -> u8 {
    match failure {
        Failure::Verification(_) => 3,
        Failure::Core(e) => match e {
            Error::Argument(_) | Error::Domain(_) | Error::Degenerate(_) => 1,
            Error::Capacity(_)
            | Error::Range(_)
            | Error::Coverage(_)
            | Error::Budget(_)
            | Error::Precision(_)
            | Error::Solver(_)
            | Error::Format(_)
            | Error::Io(_)
            | Error::Csv(_)
            | Error::Json(_) => 2,
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.config.workers as usize).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start {} workers: {e}", cli.config.workers);
            return ExitCode::from(2);
        }
    };

    let mut ctx = match Context::new(cli.config) {
        Ok(ctx) => ctx,
        Err(e) => {
            eprintln!("error: cannot open output: {e}");
            return ExitCode::from(2);
        }
    };

    let result = pool.install(|| dispatch(&mut ctx, cli.command));
    let flushed = ctx.finish();
    match result {
        Ok(()) => match flushed {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(failure) => {
            match &failure {
                Failure::Verification(msg) => eprintln!("verification failed: {msg}"),
                Failure::Core(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(exit_code(&failure))
        }
    }
}
