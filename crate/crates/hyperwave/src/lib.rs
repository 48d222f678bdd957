//! Parallel orchestration, statistics, output and the command line for
//! the `hyperwave-core` numerical library.

pub mod acceptance;
pub mod cli;
mod error;
pub mod orchestrate;
pub mod output;
pub mod stats;

pub use error::{Error, Result};
