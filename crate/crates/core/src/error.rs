//! Crate-wide error type.

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A gate or readout referenced a qubit index outside the state.
    #[error("qubit index {index} out of range for {n_qubits}-qubit state")]
    InvalidQubit { index: usize, n_qubits: usize },

    /// A parameter vector did not match the circuit's free-parameter count.
    #[error("parameter vector has length {got}, circuit expects {expected}")]
    ParamArityMismatch { got: usize, expected: usize },

    /// A feature value left the [0, pi] range required by the feature map.
    #[error("feature value {value} at position {index} outside [0, pi]")]
    FeatureScale { index: usize, value: f64 },

    /// Mismatched dimensions between two inputs.
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    /// A gradient or training call received no samples.
    #[error("empty batch")]
    EmptyBatch,

    /// Training produced a non-finite loss.
    #[error("non-finite loss at iteration {iter}")]
    Divergence { iter: usize },

    /// A series was shorter than the operation requires.
    #[error("series too short: need at least {need} values, got {got}")]
    InsufficientHistory { need: usize, got: usize },

    /// A binary-classification routine received a single-class label set.
    #[error("labels contain a single class")]
    DegenerateLabels,

    /// Exhaustive enumeration was requested beyond its size limit.
    #[error("problem size {size} exceeds exhaustive-solve limit {max}")]
    TooLarge { size: usize, max: usize },

    /// An annealing schedule violated its constraints.
    #[error("invalid annealing schedule: {0}")]
    Schedule(String),

    /// A nearest-neighbour query was made against an empty training set.
    #[error("empty training set")]
    EmptyTrainSet,

    /// The least-squares design matrix was rank deficient.
    #[error("design matrix is rank-deficient or underdetermined")]
    SingularDesign,

    /// A precomputed kernel matrix failed validation.
    #[error("kernel matrix invalid: {0}")]
    Kernel(String),

    /// Filesystem failure, with the offending path.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// An input file was overwhelmingly unparseable.
    #[error("unrecognized format: {reason}; sample rows: {samples:?}")]
    Format { reason: String, samples: Vec<String> },

    /// An operation received no data at all.
    #[error("empty input")]
    EmptyInput,

    /// A configuration value was out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
