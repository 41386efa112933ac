use thiserror::Error;

/// Errors raised by the library.
///
/// Bracket values carried by [`Error::BudgetExceeded`] are widened to `f64`
/// so the enum stays independent of the scalar type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("monomial of degree {degree} exceeds declared degree {max} in polynomial {poly}")]
    DegreeOverflow { poly: usize, degree: u32, max: u32 },

    #[error("matrix is not surjective (sigma_q = {sigma_q:e})")]
    NonSurjective { sigma_q: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("point is not on the boundary of the unit cube (sup norm {norm})")]
    NotOnBoundary { norm: f64 },

    #[error("cell budget of {cells} exhausted; achieved bracket [{lower}, {upper}]")]
    BudgetExceeded { cells: usize, lower: f64, upper: f64 },

    #[error("point is not a zero: residual {residual:e} exceeds tolerance {tol:e}")]
    NotAZero { residual: f64, tol: f64 },

    #[error("no Kantorovich route applies at radius {radius}")]
    NoRouteApplicable { radius: f64 },

    #[error("no points found on the variety after {probes} probes")]
    EmptySample { probes: usize },

    #[error("no admissible pairs in the sample")]
    NoAdmissiblePairs,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short machine-readable tag, used by the CLI's error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::Syntax { .. } => "Syntax",
            Error::DegreeOverflow { .. } => "DegreeOverflow",
            Error::NonSurjective { .. } => "NonSurjective",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::NotOnBoundary { .. } => "NotOnBoundary",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::NotAZero { .. } => "NotAZero",
            Error::NoRouteApplicable { .. } => "NoRouteApplicable",
            Error::EmptySample { .. } => "EmptySample",
            Error::NoAdmissiblePairs => "NoAdmissiblePairs",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
