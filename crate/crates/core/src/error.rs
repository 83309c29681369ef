use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("Born probability has imaginary part {0:e}")]
    NonrealResult(f64),

    #[error("matrix is not Hermitian (max |M - M^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid angles: {0}")]
    InvalidAngles(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("isotropic noise needs a two-qubit state, got joint dimension {0}")]
    UnsupportedDimension(usize),

    #[error("scheme input mismatch: {0}")]
    SchemeInputMismatch(String),

    #[error("{requested} copies requested, at most {max} supported")]
    TooManyCopies { requested: usize, max: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid correlation table: {0}")]
    InvalidTable(String),

    #[error("copy index {index} out of range 1..={copies}")]
    InvalidCopy { index: usize, copies: usize },

    #[error(
        "copy {copy}: prefix (a={prefix_a}, b={prefix_b}) has probability {prob:e} at input (x={x}, y={y})"
    )]
    ZeroPrefixProbability {
        copy: usize,
        prefix_a: usize,
        prefix_b: usize,
        x: usize,
        y: usize,
        prob: f64,
    },

    #[error("deterministic enumeration needs {0} strategy pairs (limit 1e8)")]
    EnumerationTooLarge(u128),

    #[error("see-saw did not converge within {iterations} iterations")]
    SeeSawDidNotConverge { iterations: usize },

    #[error("see-saw value {seesaw} disagrees with eigen-oracle {oracle}")]
    OracleDisagreement { seesaw: f64, oracle: f64 },

    #[error("{pointer}: {message}")]
    Format { pointer: String, message: String },
}
