//! Command-line front end for the fleet back-casting model: input parsing,
//! configuration, and the `calibrate`, `simulate`, `optimize` and `compare`
//! subcommands.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod bundled;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod report;

pub use error::{CliError, Result};
