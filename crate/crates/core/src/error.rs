use thiserror::Error;

/// Errors raised by constructors and operators of the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid: {0}")]
    InvalidGrid(String),
    #[error("layout: {0}")]
    InvalidLayout(String),
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },
    #[error("grid mismatch between scene and operator")]
    GridMismatch,
    #[error("matrix is not Hermitian (residual {residual:e} above tolerance {tolerance:e})")]
    NotHermitian { residual: f64, tolerance: f64 },
    #[error("unknown noise model `{0}`")]
    UnknownNoiseModel(String),
    #[error("wrong number of measurements: expected {expected}, got {got}")]
    MeasurementCount { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("calibration: {0}")]
    Calibration(String),
    #[error("format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
