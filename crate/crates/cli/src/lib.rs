//! Configuration-driven front end: single solves, parameter sweeps and
//! verification runs with JSON and CSV artifacts.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{parse_range, run_solve, run_sweep, run_verify, SolveOptions, SweepReport, SweepRow, VerifyReport};
pub use config::{load_config, load_profile, validate_config, ConfigIssue, Preset, RunConfig, SolverName};
pub use error::{CliError, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_INVARIANT, EXIT_OK, EXIT_RUNTIME};
pub use output::{Check, Summary};
