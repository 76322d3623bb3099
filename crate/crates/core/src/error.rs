use thiserror::Error;

/// Errors surfaced by the solvers, simulators and scenario runner.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid belief: {0}")]
    InvalidBelief(String),

    #[error("row {row} of the transition matrix is not stochastic: {reason}")]
    NotStochastic { row: usize, reason: String },

    #[error("chain is not ergodic (irreducible: {irreducible}, period: {period})")]
    NotErgodic { irreducible: bool, period: usize },

    #[error("chain is not irreducible")]
    NotIrreducible,

    #[error("iteration cap of {cap} exceeded: {context}")]
    IterationCap { cap: usize, context: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("envelope lookup failed at {0:?}; refine the grid")]
    DegenerateEnvelope(Vec<f64>),

    #[error("support of posterior law exceeded cap {cap} at stage {stage}")]
    SupportExplosion { cap: usize, stage: usize },

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
