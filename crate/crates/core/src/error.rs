use thiserror::Error;

pub type Result<T, E = QcaError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum QcaError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("singular geometry: charges coincide at ({x:.6}, {y:.6}, {z:.6}) nm")]
    SingularGeometry { x: f64, y: f64, z: f64 },

    #[error("{what} limited to {limit}, got {got}")]
    Capacity {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("solver did not converge after {iterations} iterations (best residual {residual:.3e} eV)")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("index {index} out of range for {len} cells")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("pairing error for pair {pair_id}: {message}")]
    Pairing { pair_id: i64, message: String },

    #[error("layout has no output pair")]
    NoOutput,

    #[error("layout document error at line {line}, column {column}: {message}")]
    Schema {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
