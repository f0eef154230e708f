use thiserror::Error;

/// Errors raised by the pipeline. Reporting operations never fail; these are
/// reserved for violated preconditions and internal inconsistencies.
#[derive(Debug, Error)]
pub enum Error {
    #[error("scale overflow at level q={q}: lambda_(q+1) = a^(b^(q+1)) exceeds f64 range")]
    ScaleOverflow { q: usize },
    #[error("invalid grid size {0}: must be even and >= 4")]
    InvalidGrid(usize),
    #[error("grid mismatch: {0} vs {1}")]
    GridMismatch(usize, usize),
    #[error("negative input {0} to chi")]
    NegativeInput(f64),
    #[error("matrix outside admissible ball: |A| = {norm} > {radius}")]
    OutOfBall { norm: f64, radius: f64 },
    #[error("input is not {0}")]
    Structure(&'static str),
    #[error("field is not solenoidal: max |div f| = {divergence:e}")]
    NotSolenoidal { divergence: f64 },
    #[error("insufficient time padding: need {needed}, have {available}")]
    InsufficientPadding { needed: f64, available: f64 },
    #[error("r*lambda = {0} is not a positive integer")]
    NonIntegralRLambda(f64),
    #[error("blocks unresolved: active frequency {active} exceeds Nyquist {nyquist}")]
    Unresolved { active: f64, nyquist: f64 },
    #[error("too few time slices: need {needed}, have {available}")]
    TooFewSlices { needed: usize, available: usize },
    #[error("internal assertion failed: {0}")]
    Internal(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("step from level {q}: {source}")]
    AtLevel { q: usize, source: Box<Error> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// The innermost error, with level context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLevel { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
