use thiserror::Error;

/// Errors raised by graph construction, approximation and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid circulant generator {generator} for N = {n}: {reason}")]
    InvalidGenerator {
        n: usize,
        generator: usize,
        reason: &'static str,
    },

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid edge ({0}, {1}): {2}")]
    InvalidEdge(usize, usize, &'static str),

    #[error("vertex {0} has degree zero")]
    DegreeZero(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shift is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),

    #[error("dense eigensolve requested for n = {n}, above the cap of {cap}")]
    SizeCap { n: usize, cap: usize },

    #[error("analytic Laplacian interval requested for a shift that is not a normalized Laplacian")]
    NotLaplacian,

    #[error("degenerate interval [{0}, {1}]")]
    DegenerateInterval(f64, f64),

    #[error("reciprocal is singular: |h| = {value:e} at {point:?}")]
    ReciprocalSingularity { point: Vec<f64>, value: f64 },

    #[error("shifts {0} and {1} do not commute (commutator norm {2:e})")]
    NotCommuting(usize, usize, f64),

    #[error("polynomial cube does not contain the spectral interval of shift {0}")]
    CubeMismatch(usize),

    #[error("filters do not share the same shift family")]
    ShiftFamilyMismatch,

    #[error("iteration diverged at step {iteration}: residual grew by {growth:e} from its minimum")]
    Diverged { iteration: usize, growth: f64 },

    #[error("filter is not positive definite on its spectral cube (h_min = {0})")]
    IndefiniteFilter(f64),

    #[error("reference signal has zero norm")]
    ZeroReference,

    #[error("invalid penalty constant {0}")]
    InvalidPenalty(f64),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable category used by the command line front end.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidGenerator { .. }
            | Error::InvalidSize(_)
            | Error::InvalidInput(_)
            | Error::InvalidEdge(..)
            | Error::DegreeZero(_)
            | Error::InvalidPenalty(_)
            | Error::DegenerateInterval(..) => "invalid-input",
            Error::DimensionMismatch { .. } | Error::ShiftFamilyMismatch => "dimension",
            Error::NotSymmetric(..)
            | Error::NotLaplacian
            | Error::NotCommuting(..)
            | Error::CubeMismatch(_) => "shift",
            Error::SizeCap { .. } => "size-cap",
            Error::ReciprocalSingularity { .. }
            | Error::IndefiniteFilter(_)
            | Error::ZeroReference => "numeric",
            Error::Diverged { .. } => "divergence",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
