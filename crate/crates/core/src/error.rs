use thiserror::Error;

/// Errors produced by the dynamics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("both homogeneous coordinates are zero")]
    ZeroPoint,
    #[error("degenerate map: the resultant of the lift vanishes")]
    DegenerateMap,
    #[error("coefficient size {digits} decimal digits exceeds the cap of {cap}")]
    Overflow { digits: usize, cap: usize },
    #[error("root finding did not converge: {0}")]
    RootFindingFailure(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("points do not form a cycle (residual {residual:.3e})")]
    NotACycle { residual: f64 },
    #[error("singular curve: 4a^3 + 27b^2 = 0")]
    SingularCurve,
    #[error("ambiguous orbit collision at chordal distance {distance:.3e}")]
    AmbiguousCollision { distance: f64 },
    #[error("classification inconclusive: {0}")]
    Inconclusive(String),
    #[error("fiber form vanishes identically")]
    DegenerateFiber,
    #[error("projection forgetting axis {axis} is not dominant")]
    NotDominant { axis: usize },
    #[error("elimination failed: {reason} (max residual {max_residual:.3e})")]
    EliminationFailure { reason: String, max_residual: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by malformed user input rather than by a computation.
    pub fn is_user_error(&self) -> bool {
        matches!(
            self,
            Error::ZeroPoint
                | Error::DegenerateMap
                | Error::SingularCurve
                | Error::NotDominant { .. }
                | Error::InvalidInput(_)
                | Error::Parse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
