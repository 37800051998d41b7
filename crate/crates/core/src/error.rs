use thiserror::Error;

/// Domain errors raised when an operation's preconditions are violated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("radius must be non-negative, got {0}")]
    NegativeRadius(f64),
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("height {height} outside [-{radius}, {radius}]")]
    HeightOutOfRange { height: f64, radius: f64 },
    #[error("curve needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {index} is not a unit vector (norm {norm})")]
    NotUnitVector { index: usize, norm: f64 },
    #[error("vertices {0} and {1} are antipodal; the minor arc between them is undefined")]
    AntipodalVertices(usize, usize),
    #[error("operation requires a closed curve")]
    OpenCurve,
    #[error("sample count {got} is below the minimum of {min}")]
    TooFewSamples { got: usize, min: usize },
    #[error("invalid boundary loop: {0}")]
    InvalidBoundary(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("geometry profile has no samples")]
    EmptyProfile,
    #[error("profile sample {0} has a non-positive or non-finite value")]
    InvalidProfileSample(usize),
    #[error("genus budget must be non-negative, got {0}")]
    NegativeGenus(i64),
    #[error("solver stopped after {iterations} iterations without converging (gradient norm {gradient_norm:e})")]
    NotConverged { iterations: usize, gradient_norm: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
