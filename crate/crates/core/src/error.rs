use std::path::PathBuf;

use thiserror::Error;

use crate::measure::MeasureId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a point set needs at least one point and one coordinate")]
    EmptyPointSet,

    #[error("point {row} has {found} coordinates, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("coordinate ({row}, {col}) = {value} lies outside [0, 1]")]
    OutsideUnitCube { row: usize, col: usize, value: f64 },

    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),

    #[error("coordinate index {index} is outside 1..={dim}")]
    InvalidSubset { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("measure `{0}` does not take a weight vector")]
    UnexpectedWeights(MeasureId),

    #[error("measure `{0}` requires a weight vector")]
    MissingWeights(MeasureId),

    #[error("weight {value} at coordinate {index} is not a finite non-negative number")]
    InvalidWeight { index: usize, value: f64 },

    #[error("measure `{0}` is discontinuous and cannot be differentiated")]
    NotDifferentiable(MeasureId),

    #[error("measure `{0}` has no set-based definition to sample")]
    NoGeometricDefinition(MeasureId),

    #[error("reflection average needs 2^{dim} terms; refusing dimensions above {limit}")]
    TooManyReflections { dim: usize, limit: usize },

    #[error("Sobol' dimension {requested} exceeds the {available} dimensions of the direction-number table")]
    SobolDimension { requested: usize, available: usize },

    #[error("invalid direction numbers: {0}")]
    DirectionNumbers(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("squared discrepancy {0:e} is below the -1e-12 rounding allowance")]
    NegativeSquared(f64),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
