use thiserror::Error;

/// Errors raised by the character-variety operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("logarithm is undefined at -I (distance {distance:.3e})")]
    CenterAmbiguity { distance: f64 },

    #[error("point {point:?} lies outside the {polytope} (worst constraint {slack:.3e})")]
    OutsidePolytope {
        point: [f64; 3],
        polytope: &'static str,
        slack: f64,
    },

    #[error("zero vector has no projective class")]
    ZeroVector,

    #[error("flow generator undefined: {which} is central")]
    DegenerateGenerator { which: &'static str },

    #[error("section construction failed at {base:?}: {reason}")]
    SectionSolveFailure { base: [f64; 3], reason: String },

    #[error("fiber coordinates did not converge (residual {residual:.3e})")]
    FiberSolveFailure { residual: f64 },

    #[error("relation residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    RelationViolated { residual: f64, tolerance: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("classification ambiguous: {0}")]
    ClassificationAmbiguity(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// Solver failures as opposed to bad input.
    pub fn is_solve_failure(&self) -> bool {
        matches!(
            self,
            Error::SectionSolveFailure { .. } | Error::FiberSolveFailure { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
