use thiserror::Error;

use crate::config::ConfigIssue;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {}", join(.0))]
    Config(Vec<ConfigIssue>),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("invariant violation: {}", .0.join("; "))]
    Invariant(Vec<String>),
    #[error(transparent)]
    Core(wavesteer::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn join(issues: &[ConfigIssue]) -> String {
    issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl From<wavesteer::Error> for CliError {
    fn from(e: wavesteer::Error) -> Self {
        match e {
            wavesteer::Error::Infeasible(msg) => CliError::Infeasible(msg),
            wavesteer::Error::Config(msg) => {
                CliError::Config(vec![ConfigIssue { path: "(state)".into(), message: msg }])
            }
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::Invariant(_) => EXIT_INVARIANT,
            _ => EXIT_RUNTIME,
        }
    }
}
