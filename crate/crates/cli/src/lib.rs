//! Command-line front end for isosplit: clustering CSV files, generating the
//! synthetic benchmark data, and running the accuracy, sweep and timing suites.

pub mod bench;
pub mod commands;
pub mod error;
pub mod io;
pub mod plot;

pub use commands::run;
pub use error::{CliError, CliResult};
