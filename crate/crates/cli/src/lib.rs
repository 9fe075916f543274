//! Command-line workflows over `mermin-core`: angle and efficiency sweeps,
//! surfaces, angle optimization, validation against the Fock-space oracle.

pub mod args;
pub mod commands;
pub mod output;
pub mod validate;

use std::fs::File;
use std::io::Write;

pub use commands::{execute, CliError, Emit, Run};

/// Write every table of a finished run.
pub fn write_run(run: &Run) -> Result<(), CliError> {
    for e in &run.emits {
        let bytes = e.table.to_bytes(e.format);
        match &e.dest {
            Some(path) => File::create(path)?.write_all(&bytes)?,
            None => std::io::stdout().lock().write_all(&bytes)?,
        }
    }
    Ok(())
}
