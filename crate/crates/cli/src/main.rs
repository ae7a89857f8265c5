use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use clap::Parser;
use diffusim_cli::{threads_from_env, Cli, CliError, THREADS_ENV};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let threads = match threads_from_env(std::env::var(THREADS_ENV).ok().as_deref()) {
        Ok(t) => t,
        Err(e) => return fail(&e),
    };
    match panic::catch_unwind(AssertUnwindSafe(|| {
        cli.command.execute_with_threads(threads)
    })) {
        Ok(Ok(_)) => ExitCode::SUCCESS,
        Ok(Err(e)) => fail(&e),
        Err(_) => ExitCode::from(3),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}
