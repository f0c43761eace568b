use thiserror::Error;

use crate::integrator::ValidationReport;

/// Which end of a scan window or bracket an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Lower,
    Upper,
}

impl std::fmt::Display for Edge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Edge::Lower => f.write_str("lower"),
            Edge::Upper => f.write_str("upper"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("radius {r} outside (0, 1]")]
    RadiusOutOfDomain { r: f64 },

    #[error("time {t} outside (0, 1/2]")]
    TimeOutOfDomain { t: f64 },

    #[error("right-hand side evaluated at singular point t = {t}")]
    Singularity { t: f64 },

    #[error("invalid problem: {0}")]
    InvalidSpec(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("step size underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("integrator exceeded {steps} steps at t = {t}")]
    TooManySteps { t: f64, steps: usize },

    #[error("scan window too small: residual vanishes at the {edge} edge a = {a}")]
    WindowTooSmall { edge: Edge, a: f64 },

    #[error("invalid fold bracket: {edge} end lambda = {lambda} has {roots} nontrivial roots")]
    FoldBracket {
        edge: Edge,
        lambda: f64,
        roots: usize,
    },

    #[error("trajectory rejected by validators: {0:?}")]
    NotAccepted(Box<ValidationReport>),

    #[error("lambda = {lambda} outside the fixed-point domain [0, 384]")]
    FixedPointDomain { lambda: f64 },

    #[error("relaxation did not converge at truncation t = {t_left} after {iterations} iterations; residual trace {trace:?}")]
    RelaxationFailed {
        t_left: f64,
        iterations: usize,
        trace: Vec<f64>,
    },

    #[error("no shooting root found for lambda = {lambda}")]
    NoRoot { lambda: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("malformed data: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by the caller's inputs rather than by the numerics.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::RadiusOutOfDomain { .. }
                | Error::TimeOutOfDomain { .. }
                | Error::Singularity { .. }
                | Error::InvalidSpec(_)
                | Error::Precondition(_)
                | Error::WindowTooSmall { .. }
                | Error::FoldBracket { .. }
                | Error::FixedPointDomain { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
