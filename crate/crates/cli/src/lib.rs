//! Command-line front end: argument parsing, report assembly and the
//! acceptance criteria shared by `semirec acceptance` and the test suite.

pub mod acceptance;
pub mod cli;
pub mod error;

pub use cli::{run, Cli, Command, Report};
pub use error::{CliError, CliResult};
