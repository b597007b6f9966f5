use thiserror::Error;

/// Failures surfaced by every module of the crate.
///
/// Each variant maps to a stable upper-case constant via [`Error::code`], which
/// the command-line front end prints and uses to pick an exit status.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch between {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix is singular: pivot {pivot} has magnitude {magnitude:e}")]
    Singular { pivot: usize, magnitude: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("equality matrix is rank deficient (Gram matrix singular at pivot {pivot})")]
    RankDeficientEq { pivot: usize },

    #[error("polytope is empty (Chebyshev program infeasible)")]
    EmptyPolytope,

    #[error("polytope has no interior: inscribed radius {radius:e}")]
    NoInterior { radius: f64 },

    #[error("simplex pivot budget of {pivots} exhausted; cycling suspected")]
    CycleSuspected { pivots: usize },

    #[error("walk {walk}: direction is parallel to every inequality")]
    DirectionDegenerate { walk: usize },

    #[error("walk {walk}: chord is unbounded; the polytope is not bounded")]
    UnboundedPolytope { walk: usize },

    #[error("linear program is unbounded; the polytope is not bounded")]
    UnboundedProgram,

    #[error("walk {walk}: {attempts} direction redraws were all degenerate")]
    RetryExhausted { walk: usize, attempts: usize },

    #[error("walk {walk}: new point violates row {row} by {violation:e}")]
    InfeasibleIterate {
        walk: usize,
        row: usize,
        violation: f64,
    },

    #[error("Friedman-Rafsky variance {variance:e} is not positive")]
    DegenerateTest { variance: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable identifier for the failure class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::Singular { .. } => "SINGULAR_MATRIX",
            Error::InvalidInput(_) => "INVALID_INPUT",
            Error::RankDeficientEq { .. } => "RANK_DEFICIENT_EQ",
            Error::EmptyPolytope => "EMPTY_POLYTOPE",
            Error::NoInterior { .. } => "NO_INTERIOR",
            Error::CycleSuspected { .. } => "CYCLE_SUSPECTED",
            Error::DirectionDegenerate { .. } => "DIRECTION_DEGENERATE",
            Error::UnboundedPolytope { .. } => "UNBOUNDED_POLYTOPE",
            Error::UnboundedProgram => "UNBOUNDED_POLYTOPE",
            Error::RetryExhausted { .. } => "RETRY_EXHAUSTED",
            Error::InfeasibleIterate { .. } => "INFEASIBLE_ITERATE",
            Error::DegenerateTest { .. } => "DEGENERATE_TEST",
            Error::Parse(_) => "PARSE_ERROR",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
