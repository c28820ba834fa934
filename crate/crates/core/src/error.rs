use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |m - m^H| = {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("expected {expected} per-site fields, got {got}")]
    BadFieldLength { expected: usize, got: usize },

    #[error("unsupported number of sites {0} (supported: 2..=10, closed form: 3)")]
    UnsupportedSize(usize),

    #[error("coupling J must be non-zero and finite, got {0}")]
    InvalidCoupling(f64),

    #[error("B <-> -B mapping violated for {pair}: deviation {deviation:e}")]
    MappingViolation { pair: String, deviation: f64 },

    #[error("scaled temperature must be positive and finite, got {0}")]
    NonPositiveTau(f64),

    #[error("elements do not describe a valid X state: {0}")]
    InvalidXState(String),

    #[error("not a two-qubit density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("bad site index: {0}")]
    BadSiteIndex(String),

    #[error("zero-temperature limit is degenerate at B = 0; use the ground-state mixture")]
    DegenerateLimit,

    #[error("value {0} is outside [0, 1]")]
    OutOfRange(f64),

    #[error("{quantity} deviation {deviation:e} exceeds tolerance {tolerance:e} at {point}")]
    ToleranceExceeded {
        quantity: &'static str,
        point: String,
        deviation: f64,
        tolerance: f64,
    },

    #[error("no entanglement threshold found in the requested range")]
    NoThresholdFound,

    #[error("unknown figure id {0} (expected 1..=4)")]
    BadFigureId(u32),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
