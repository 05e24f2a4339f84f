use thiserror::Error;

/// Errors shared by every analysis operation in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mixed scalar modes: {0}")]
    MixedModes(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty T∩[0,1]")]
    EmptyTSample,

    #[error("grid budget exceeded")]
    GridBudgetExceeded,

    #[error("grid refinement insufficient: {0} not on modulus grid")]
    GridRefinementInsufficient(String),

    #[error("point not on tabulated carrier: {0}")]
    OffCarrier(String),

    #[error("point outside domain: {0}")]
    OutsideDomain(String),

    #[error("non-convex oracle: difference quotient increased at t = {0}")]
    NonConvexOracle(String),

    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),

    #[error("positive cycle: {0}")]
    PositiveCycle(String),

    #[error("truncation index must be at least 1")]
    ZeroTruncation,

    #[error("no probe point inside domain")]
    NoProbeInDomain,

    #[error("no evaluable sample: {0}")]
    EmptySample(String),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
