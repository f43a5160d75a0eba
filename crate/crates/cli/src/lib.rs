//! Command-line runner: resolves a [`RunConfig`] from flags and an optional
//! JSON file, runs one command and reports through exit codes 0/1/2.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod run;

use clap::Parser;

pub use config::{Cli, Command, CommandKind, Flags, Format, RunConfig};
pub use error::{CliError, EXIT_CHECK_FAILED, EXIT_PASS, EXIT_USAGE};
pub use run::{run, write_atomic, Outcome, Summary};

/// Caps the global worker pool when `OUFREQ_THREADS` is set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("OUFREQ_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "OUFREQ_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    // A pool that already exists (e.g. in tests) is left as is.
    #[cfg(feature = "parallel")]
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
        }
    };
    let result = init_threads().and_then(|()| {
        let (kind, flags) = cli.command.split();
        let cfg = RunConfig::resolve(kind, flags)?;
        run(&cfg)
    });
    match result {
        Ok(outcome) => outcome.exit_code,
        Err(e) => {
            eprintln!("oufreq: {e}");
            e.exit_code()
        }
    }
}
