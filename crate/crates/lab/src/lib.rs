//! Command-line laboratory around `nematic-core`: run configurations,
//! scenario presets, `ε` sweeps, refinement studies and CSV output.

pub mod cli;
pub mod config;
mod error;
pub mod output;
pub mod scenario;
pub mod study;

pub use config::{parse_config, Expectation, ProfileKind, RunConfig, PRESETS};
pub use error::{LabError, Location};
pub use scenario::{execute, run_scenario, Execution, RunStatus};
pub use study::{epsilon_sweep, refinement_study, RefinementTable, SweepSummary};
