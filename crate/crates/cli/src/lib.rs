//! Command implementations behind the `harmonia` binary.

pub mod commands;
pub mod csv;
pub mod report;
pub mod scenario;

pub use commands::{CliError, Theorem};
pub use report::{ExitStatus, RunReport};
pub use scenario::{parse_scenario, Scenario, ScenarioError};
