use thiserror::Error;

/// Errors raised by model construction, transforms and verifiers.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("under-resolved quadrature: order {order} cannot integrate band {band}")]
    UnderResolvedQuadrature { order: usize, band: String },

    #[error("operation not supported on {model}: {what}")]
    UnsupportedModel { model: String, what: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

pub(crate) fn invalid_param(msg: impl Into<String>) -> LabError {
    LabError::InvalidParameter(msg.into())
}

pub(crate) fn invalid_input(msg: impl Into<String>) -> LabError {
    LabError::InvalidInput(msg.into())
}
