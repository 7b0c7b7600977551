use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("frequency {re} + {im}i lies in the lower half-plane")]
    LowerHalfPlane { re: f64, im: f64 },

    #[error("zero frequency is not admissible here")]
    ZeroFrequency,

    #[error("field and source points coincide")]
    CoincidentPoints,

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("frequency grid too coarse: half-grid discrepancy {discrepancy:.3e} exceeds {limit:.1e}")]
    GridTooCoarse { discrepancy: f64, limit: f64 },

    #[error("mollification width {width} is below two grid spacings ({min})")]
    UnderResolvedInterface { width: f64, min: f64 },

    #[error("Born series cannot converge: spectral radius estimate {spectral_radius:.4}")]
    BornDivergent { spectral_radius: f64 },

    #[error("Born series did not reach tolerance {tolerance:.1e} within {iterations} iterations")]
    BornStalled { iterations: usize, tolerance: f64 },

    #[error("linear system is numerically singular")]
    Singular,

    #[error("resolution {n} exceeds the cap {cap} for the {method} solver")]
    ResolutionCap { n: usize, cap: usize, method: &'static str },

    #[error("scenario validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("scenario parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
