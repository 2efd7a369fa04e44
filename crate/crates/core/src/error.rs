use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("transform has a pole at x = {0}")]
    PoleAt(f64),
    #[error("Cauchy transform vanished, reciprocal undefined")]
    ZeroG,
    #[error("Stieltjes inversion did not stabilise at {bad} of {total} grid points")]
    GridTooCoarse { bad: usize, total: usize },
    #[error("measure has infinite variance")]
    InfiniteVariance,
    #[error("measure has zero variance")]
    ZeroVariance,
    #[error("expected {expected} atoms, found {found} after merging")]
    AtomCollision { expected: usize, found: usize },
    #[error("moment of order {0} diverges")]
    DivergentMoment(usize),
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("integrator exceeded {0} steps")]
    MaxStepsExceeded(usize),
    #[error("vector field is not in a case where this applies")]
    CaseMismatch,
    #[error("Levy measure is not bounded below")]
    UnboundedBelowTau,
    #[error("evaluation landed on a branch cut")]
    BranchCutHit,
    #[error("stable parameter b is not normalised for this exponent")]
    UnnormalizedB,
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("not supported: {0}")]
    Unsupported(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: &str) -> Error {
    Error::InvalidArgument(String::from(msg))
}
