use thiserror::Error;

/// Errors raised by the dilation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid factor shape: {0}")]
    InvalidShape(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("columns are not orthonormal (deviation {deviation:.3e})")]
    NotIsometry { deviation: f64 },

    #[error("matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("channel rejected: {0}")]
    ChannelRejected(String),

    #[error("operation requires the {0} picture")]
    WrongPicture(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("power {requested} exceeds dilation horizon {horizon}")]
    HorizonExceeded { requested: usize, horizon: usize },

    #[error("channel is not cyclic with period {period} (deviation {deviation:.3e})")]
    NotCyclic { period: usize, deviation: f64 },

    #[error("channels do not commute (commutator norm {commutator:.3e})")]
    NonCommuting { commutator: f64 },

    #[error("dilation dimension {size} exceeds limit {limit}")]
    ResourceLimit { size: usize, limit: usize },

    #[error("construction check failed: {0}")]
    ConstructionCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
