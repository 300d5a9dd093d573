//! Command-line front end for the `ast-ucb` experiments.
//!
//! Subcommands: `run`, `sweep`, `bounds`, `reproduce-fig2` (Case I) and
//! `reproduce-fig3` (Case II). All files land in `--out`.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod reproduce;

pub use args::{parse_args, Action, CliCommand};
pub use commands::{compute, emit_bound_report, execute, reproduce_case};
pub use error::CliError;
pub use reproduce::{Case, ReproAxis, ReproduceOptions};
