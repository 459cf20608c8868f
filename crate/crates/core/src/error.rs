use thiserror::Error;

/// Errors raised by coin construction, walk evolution and the estimation layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("invalid coin dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("unsupported dimension {dim} for {what}")]
    UnsupportedDimension { dim: usize, what: &'static str },

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("walk horizon exceeded: step {t} with t_max = {t_max}")]
    Capacity { t: usize, t_max: usize },

    #[error("dimension mismatch: state has D = {state}, coin has D = {coin}")]
    DimensionMismatch { state: usize, coin: usize },

    #[error("ratio undefined: QFI = {qfi:e} is below the {threshold:e} threshold")]
    UndefinedRatio { qfi: f64, threshold: f64 },

    #[error("unreliable estimate: {0}")]
    Unreliable(String),
}

pub type Result<T> = std::result::Result<T, WalkError>;

pub(crate) fn domain(msg: impl Into<String>) -> WalkError {
    WalkError::Domain(msg.into())
}
