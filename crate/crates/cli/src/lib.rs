//! Scenario runner: named, reproducible experiments with CSV and JSON
//! outputs.

pub mod config;
pub mod error;
pub mod report;
pub mod runner;
pub mod scenarios;
pub mod tools;

pub use error::{CliError, CliResult};
