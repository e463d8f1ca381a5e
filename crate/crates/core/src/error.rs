use thiserror::Error;

/// Failures raised by the library. Every variant is a refusal to compute,
/// never a silently degraded answer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate pencil member: {which}_{alpha} vanishes")]
    DegeneratePencil { which: &'static str, alpha: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("separation coordinates coincide (x1 = x2 = {0})")]
    SeparationDegenerate(f64),
    #[error("branch error: {0}")]
    Branch(String),
    #[error("branch tracking failed at step {step}: {detail}")]
    BranchTracking { step: usize, detail: String },
    #[error("integration blew up after t = {last_good_time}")]
    BlowUp { last_good_time: f64 },
    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),
    #[error("quadrature did not reach tolerance {tol:e}: estimate {estimate}, error {error:e}")]
    Tolerance { estimate: f64, error: f64, tol: f64 },
    #[error("state inconsistent with surface: {0}")]
    Consistency(String),
    #[error("no real family: {0}")]
    NoRealFamily(String),
}

impl Error {
    /// True for numerical refusals (as opposed to malformed input).
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidParams(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
