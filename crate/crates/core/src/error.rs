use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operation undefined at the origin")]
    ZeroPoint,

    #[error("body kind has no closed-form polar: {0}")]
    UnsupportedKind(&'static str),

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("rejection sampling acceptance {acceptance:e} is below 1e-6")]
    DegenerateBody { acceptance: f64 },

    #[error("cutting-plane gap {gap:e} above tolerance after {iters} iterations (best value {best_value})")]
    IterationLimit { iters: usize, gap: f64, best_point: Vec<f64>, best_value: f64 },

    #[error("linear program infeasible")]
    LpInfeasible,

    #[error("linear program unbounded")]
    LpUnbounded,

    #[error("linear program did not converge within {0} pivots")]
    LpPivotLimit(usize),

    #[error("linear program basis became singular")]
    LpSingular,

    #[error("inner and outer radii coincide (R = r = {0})")]
    DegenerateRatio(f64),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("adversary violated its own contract at round {round}: {reason}")]
    AdversaryViolation { round: usize, reason: String },

    #[error("action at round {round} lies outside the playing set (gauge {gauge})")]
    InfeasibleAction { round: usize, gauge: f64 },

    #[error("starting point is infeasible (gauge {0})")]
    InfeasibleStart(f64),

    #[error("linear optimization oracle failed: {0}")]
    OracleFailure(Box<Error>),

    #[error("invalid body specification: {0}")]
    Spec(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
