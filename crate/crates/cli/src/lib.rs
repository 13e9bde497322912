//! Library surface of the `rsp` command line tool.
//!
//! [`run_from`] parses and executes a full command line and returns the
//! report text, which is what the binary prints; tests use it to check
//! output byte-for-byte without spawning a process.

pub mod commands;
pub mod config;

pub use commands::{execute, run_from, sweep_points, SweepPoint};
pub use config::{Cli, CliError, Command, OutputFormat, ProtocolChoice};
