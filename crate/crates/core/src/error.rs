//! Crate-wide error type.

/// Errors produced by the geometry, forward-model, imaging, theory and
/// metrics modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("antenna index out of bounds: {0}")]
    IndexOutOfBounds(String),
    #[error("transmit and receive sets overlap: {0}")]
    SplitOverlap(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("argument outside supported range: {0}")]
    Overflow(String),
    #[error("singular kernel: {0}")]
    Coincidence(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series tolerance not met: {0}")]
    ToleranceNotMet(String),
    #[error("truncation cap exceeded: {0}")]
    CapExceeded(String),
    #[error("zero matrix has no signal subspace")]
    ZeroMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("anomalies overlap: {0}")]
    AnomalyOverlap(String),
    #[error("map has no positive value to normalize by")]
    AllZeroMap,
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the numerics themselves, as opposed to bad
    /// inputs. The CLI maps these to a distinct exit code.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Overflow(_)
                | Error::Coincidence(_)
                | Error::Domain(_)
                | Error::ToleranceNotMet(_)
                | Error::CapExceeded(_)
                | Error::ZeroMatrix
                | Error::AllZeroMap
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
