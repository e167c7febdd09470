//! Scenario-driven front end for `orbifold-lab`: load a JSON scenario, run
//! the requested stages, and write a JSON report or a CSV bundle.

pub mod emit;
pub mod pipeline;
pub mod report;
pub mod scenario;

use thiserror::Error;

pub const TOOL_NAME: &str = "orbifold-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable that overrides the default output directory.
pub const OUT_ENV: &str = "ORBIFOLD_LAB_OUT";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("scenario invalid:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),
    #[error("guard exceeded: {0}")]
    Guard(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("computation failed: {0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Io(_) => 4,
            CliError::Compute(_) => 1,
        }
    }
}

pub use emit::{emit, Format};
pub use pipeline::{resolve_stages, run, Stage};
pub use report::{read_report, RunReport};
pub use scenario::{load_scenario, parse_scenario, validate, Loaded, Scenario};
