use alloc::string::String;

/// Contract violations and analysis failures raised by the core crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("cultural vector dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("cultural vector component {index} is not finite")]
    NonFiniteComponent { index: usize },

    #[error("tolerance {0} is below the floor {floor}", floor = crate::model::MIN_TOLERANCE)]
    ToleranceBelowFloor(f64),

    #[error("edge weight {0} is outside the open interval (0, 1)")]
    WeightOutOfRange(f64),

    #[error("node {node} is out of range for a network of {len} nodes")]
    NodeOutOfRange { node: usize, len: usize },

    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(usize),

    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("too few usable rows for regression: {have} (need at least {need})")]
    TooFewRows { have: usize, need: usize },

    #[error("design matrix is rank deficient: predictor `{0}` is degenerate")]
    RankDeficient(String),
}

pub type Result<T> = core::result::Result<T, Error>;
