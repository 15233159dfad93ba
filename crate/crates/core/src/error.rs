use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("need two classes")]
    NeedTwoClasses,

    #[error("zero cross-class dissimilarity between objects {row} and {col} violates D(x,y) = 0 iff x = y together with the class gap")]
    ZeroCrossClass { row: usize, col: usize },

    #[error("unknown class label {0:?}")]
    UnknownClass(String),

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("no margin: bound undefined (delta {delta} <= eps {eps})")]
    NoMargin { delta: f64, eps: f64 },

    #[error("cover radius must be below the class gap (eps {eps} >= delta_hat {delta_hat})")]
    CoverRadiusTooLarge { eps: f64, delta_hat: f64 },

    #[error("empty distance sequence")]
    EmptyDistances,

    #[error("invalid dissimilarity matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix shape mismatch: {0}")]
    Shape(String),

    #[error("index {index} out of range for {len} objects")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("per_class must be at least 1")]
    EmptyFamily,

    #[error("empty point set")]
    EmptyPointSet,

    #[error("measure {measure} cannot be applied: {reason}")]
    MeasureMismatch {
        measure: &'static str,
        reason: String,
    },

    #[error("{0}")]
    Probe(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
