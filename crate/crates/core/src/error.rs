use thiserror::Error;

/// Errors raised by frame operations.
///
/// Verification routines never fail on numerical grounds; they report.
/// These variants cover malformed inputs and violated preconditions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("column {0} has zero norm")]
    ZeroColumn(usize),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("first n columns are linearly dependent (|det| = {det:e})")]
    SingularBasis { det: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("seed norm {norm} is not below 1 - {margin:e}")]
    SeedTooLong { norm: f64, margin: f64 },
    #[error("rows are not orthonormal (max deviation {residual:e})")]
    RowsNotOrthonormal { residual: f64 },
    #[error("dimension {0} is not supported by this operation")]
    UnsupportedDimension(usize),
    #[error("every pair (j, k) is degenerate for index {index}")]
    DegeneratePair { index: usize },
    #[error("column {index} has norm {norm}, expected 1")]
    NotUnitNorm { index: usize, norm: f64 },
    #[error("columns {0} and {1} are parallel")]
    TrivialFrame(usize, usize),
    #[error("expected {expected} vectors, got {actual}")]
    WrongCount { expected: usize, actual: usize },
    #[error("frame is not Parseval (max |S - I| = {residual:e})")]
    NotParseval { residual: f64 },
    #[error("operation requires dimension {expected}, frame has dimension {actual}")]
    WrongDimension { expected: usize, actual: usize },
}

pub type Result<T> = std::result::Result<T, FrameError>;
