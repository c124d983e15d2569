use thiserror::Error;

/// Errors produced anywhere in the discretization pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh level must be at least 1, got {0}")]
    InvalidLevel(usize),

    #[error("triangle {index} is degenerate (signed area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("unsupported polynomial degree {degree}: {reason}")]
    UnsupportedDegree { degree: usize, reason: &'static str },

    #[error("invalid barycentric coordinates {0:?}")]
    InvalidBarycentric([f64; 3]),

    #[error("basis function {function} is not supported on element {element}")]
    OutsideSupport { function: usize, element: usize },

    #[error("invalid material constants mu = {mu}, lambda = {lambda}: both must be positive")]
    InvalidMaterial { mu: f64, lambda: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is numerically singular at pivot {column} (largest candidate {magnitude:e})")]
    SingularPivot { column: usize, magnitude: f64 },

    #[error("relative residual {residual:e} exceeds {tolerance:e} (history {history:?})")]
    ResidualTooLarge {
        residual: f64,
        tolerance: f64,
        history: Vec<f64>,
    },

    #[error("problem too large for dense computation: {size} > {cap}")]
    DimensionCap { size: usize, cap: usize },

    #[error("dense linear algebra failure: {0}")]
    Dense(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
