use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("signal has zero total probability")]
    ZeroMassSignal,
    #[error("tabular utility has no entry for action {0:?}")]
    MissingTabularEntry(Vec<usize>),
    #[error("max-weight action is not defined for {0}")]
    UnsupportedSense(String),
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),
    #[error("receiver utility must be linear for this operation")]
    NonLinearReceiver,
    #[error("arrangement needs at least one state")]
    DimensionTooSmall,
    #[error("enumeration too large: {what} exceeds {limit}")]
    TooLarge { what: String, limit: usize },
    #[error("no source-sink path")]
    NoPath,
    #[error("iteration cap of {0} reached")]
    IterationCap(usize),
    #[error("LP is infeasible")]
    Infeasible,
    #[error("LP is unbounded")]
    Unbounded,
    #[error("oracle under-delivered its approximation guarantee: {0}")]
    OracleContractViolation(String),
    #[error("parameter error: {0}")]
    ParameterError(String),
    #[error("degenerate bounds: all sender utilities are zero")]
    DegenerateBounds,
    #[error("prior degenerates: {0}")]
    PriorDegenerate(String),
    #[error("specification has no known solution")]
    MissingSolution,
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
