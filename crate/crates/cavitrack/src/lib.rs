//! Command-line front end: run configuration, file formats and figures.
// `!(a > b)` rejects NaN along with the failing comparison.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod svg;

pub use config::RunConfig;
pub use error::CliError;
