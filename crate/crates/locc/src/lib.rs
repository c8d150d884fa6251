//! File formats, JSON reports and the command-line front end for
//! [`locc_core`].

pub mod cli;
pub mod error;
pub mod format;
pub mod json;
pub mod report;

pub use error::{CliError, Result};
