//! Scenario files, reports and the `eol` command set.

pub mod app;
pub mod commands;
pub mod error;
pub mod report;
pub mod scenario;
pub mod verify;

pub use error::CliError;

/// Version tag carried by every scenario and report.
pub const SCHEMA: &str = "eol/1";
