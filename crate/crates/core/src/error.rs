use thiserror::Error;

use crate::group::GroupTag;

/// Errors raised by the numerical kernels in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("incompatible groups: {0:?} and {1:?}")]
    GroupMismatch(GroupTag, GroupTag),

    #[error("dilation parameter must be a positive finite number, got {0}")]
    InvalidDilation(f64),

    #[error("{0:?} has no action on the plane")]
    NoPlaneAction(GroupTag),

    #[error("invalid grid bounds: {0}")]
    InvalidBounds(String),

    #[error("invalid cone index ({0}, {1}); expected i, j in {{1, 2}}")]
    InvalidCone(u8, u8),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("incompatible grids: {0}")]
    IncompatibleGrid(String),

    #[error("Schatten exponent must be >= 1, got {0}")]
    InvalidExponent(f64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("lower bound check failed: minimum {min} at x = {at}")]
    NonPositiveLowerBound { min: f64, at: f64 },

    #[error("not enough sweep records: need at least {need}, got {got}")]
    TooFewRecords { need: usize, got: usize },

    #[error("missing representation labels for {0:?}")]
    MissingLabels(GroupTag),

    #[error("singular point: {0}")]
    SingularNode(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
