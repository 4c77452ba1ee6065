use thiserror::Error;

/// Errors raised by the library. Each variant maps to one documented failure
/// mode; the CLI turns these into exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("moment-unavailable: {0}")]
    MomentUnavailable(String),

    #[error("invalid atom distribution: {0}")]
    InvalidAtom(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("unknown builtin ensemble `{0}`")]
    UnknownEnsemble(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("eigensolver-no-convergence: eigenvalue {index} after {iterations} iterations (off-diagonal {residual:e})")]
    NoConvergence {
        index: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("resolvent-solve-unstable: minor {minor} residual {residual:e}")]
    ResolventSolveUnstable { minor: usize, residual: f64 },

    #[error("identity-degenerate: |u_{index}^* X| = {overlap:e}")]
    IdentityDegenerate { index: usize, overlap: f64 },

    #[error("eigenvalue-collision: minor eigenvalue {index} within {spacing:e} of the target")]
    EigenvalueCollision { index: usize, spacing: f64 },

    #[error("insufficient-samples: need at least {required}, got {got}")]
    InsufficientSamples { required: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("all {trials} trials failed; first cause: {first}")]
    AllTrialsFailed { trials: usize, first: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
