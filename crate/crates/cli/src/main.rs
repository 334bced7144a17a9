//! `symtop` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 computational failure,
//! 3 verification failure.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use symtop::io::Format;

use args::{Cli, Command, QsAction, RunConfig, VerifyAction};
use commands::{emit, Failure, Report};

fn pool(threads: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Compute(format!("cannot start worker pool: {e}")))
}

/// Runs a command that yields a report and maybe a deferred failure; the
/// report is written either way.
fn finish(
    rc: &RunConfig,
    default_format: Format,
    body: impl FnOnce(&RunConfig) -> Result<(Report, Option<Failure>), Failure> + Send,
) -> Result<(), Failure> {
    let (report, problem) = pool(rc.threads)?.install(|| body(rc))?;
    emit(&report, rc.format.unwrap_or(default_format), rc.out.as_deref())?;
    problem.map_or(Ok(()), Err)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Spectrum(c) => finish(&c.resolve()?, Format::Csv, commands::spectrum),
        Command::Qs { action: QsAction::List(c) } => finish(&c.resolve()?, Format::Csv, |rc| Ok((commands::qs_list(rc), None))),
        Command::Algebraic(c) => finish(&c.resolve()?, Format::Json, |rc| Ok((commands::algebraic(rc)?, None))),
        Command::Classify(c) => finish(&c.resolve()?, Format::Csv, |rc| Ok((commands::classify(rc)?, None))),
        Command::Count(c) => finish(&c.resolve()?, Format::Csv, commands::count),
        Command::Verify { action: VerifyAction::All(c) } => finish(&c.resolve()?, Format::Json, commands::verify_all),
        Command::Figure { id, out, threads } => {
            let files = pool(threads.unwrap_or(0))?.install(|| commands::figure(id, &out))?;
            for f in files {
                println!("{}", f.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            log::debug!("exiting with code {}", f.exit_code());
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
