use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("infeasible mixture: {0}")]
    InfeasibleMixture(String),
    #[error("empty data: {0}")]
    EmptyData(String),
    #[error("side information required: {0}")]
    NeedsSideInfo(String),
    #[error("unsupported row kind: {0}")]
    UnsupportedRowKind(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("infeasible model: {0}")]
    Infeasible(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("incomplete model: {0}")]
    IncompleteModel(String),
    #[error("missing fidelity coefficient for {0}")]
    MissingCoefficient(String),
    #[error("degenerate rate for {0}")]
    DegenerateRate(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of an algorithm on valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_) | Error::Infeasible(_) | Error::InfeasibleMixture(_) | Error::DegenerateRate(_)
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
