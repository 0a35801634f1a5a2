use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("reference vector is identically zero")]
    ZeroReference,

    #[error("invalid search problem: {0}")]
    InvalidSearch(String),

    #[error("invalid oracle label `{0}`")]
    InvalidLabel(String),

    #[error("invalid spin system: {0}")]
    InvalidSpinSystem(String),

    #[error("invalid pulse event: {0}")]
    InvalidEvent(String),

    #[error("purity parameter {0} outside (0, 1]")]
    PurityOutOfRange(f64),

    #[error("acquisition misconfigured: {0}")]
    Acquisition(String),

    #[error("no detectable peaks in reference spectrum")]
    NoPeaks,

    #[error("ambiguous readout: {0}")]
    AmbiguousReadout(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
