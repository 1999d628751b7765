//! Command-line front end for the `timekk` toolkit.

pub mod config;
pub mod error;
pub mod model;
pub mod run;

pub use config::{Cli, CommandName, Format, GridSpec, RunConfig, SignChoice};
pub use error::CliError;
pub use model::{Model, ModelKind};
pub use run::run;

use std::io::Write;

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = write!(stderr, "{}", e.render());
            // help and version are not errors
            return if code == 0 { 0 } else { 2 };
        }
    };
    let result = RunConfig::from_cli(&cli).and_then(|cfg| {
        if cli.flags.show_config {
            stdout.write_all(cfg.show()?.as_bytes())?;
            Ok(())
        } else {
            run(&cfg, stdout)
        }
    });
    match result {
        Ok(()) => 0,
        // downstream closed early, as with `| head`
        Err(e) if e.is_broken_pipe() => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
