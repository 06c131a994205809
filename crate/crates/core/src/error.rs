use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid probability: {0}")]
    InvalidProbability(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("circuit not executable on this topology: {0}")]
    NotExecutable(String),

    #[error("insufficient qubits: need {need}, have {have}")]
    InsufficientQubits { need: usize, have: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("stale calibration epoch {requested} (profile is at epoch {current})")]
    StaleEpoch { requested: u64, current: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("missing artifact: {0}")]
    MissingArtifact(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
