use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible target: {0}")]
    Infeasible(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("krylov error estimate {estimate:e} exceeds tolerance {tolerance:e}; reduce the step")]
    StepSize { estimate: f64, tolerance: f64 },

    #[error("sector mismatch: operator acts on {expected:?}, state lives in {found:?}")]
    SectorMismatch {
        expected: (usize, usize, usize),
        found: (usize, usize, usize),
    },

    #[error("time {t} outside accumulated history [0, {end}]")]
    OutOfHistory { t: f64, end: f64 },

    #[error("time grid mismatch: {0}")]
    GridMismatch(String),

    #[error("cutoff detection failed: {0}")]
    Detection(String),
}

impl Error {
    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Calibration(_)
                | Error::Convergence { .. }
                | Error::StepSize { .. }
                | Error::Detection(_)
        )
    }
}
