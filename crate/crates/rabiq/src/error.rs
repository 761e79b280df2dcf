use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RabiError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole proximity: x = {x} lies within {guard} of pole {pole}")]
    PoleProximity { x: f64, pole: f64, guard: f64 },
    #[error("non-convergence: {0}")]
    NonConvergence(String),
    #[error("degenerate: {0}")]
    Degenerate(String),
    #[error("route disagreement: {0}")]
    RouteDisagreement(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl RabiError {
    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            RabiError::NonConvergence(_) | RabiError::RouteDisagreement(_) => 2,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for RabiError {
    fn from(e: std::io::Error) -> Self {
        RabiError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, RabiError>;
