use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dense table over {m} variables exceeds the cap of {cap}")]
    TableTooLarge { m: usize, cap: usize },

    #[error("elimination step {step} (variable {var}): neighbourhood size {eta} exceeds the table cap {cap}")]
    NeighbourhoodTooLarge {
        step: usize,
        var: usize,
        eta: usize,
        cap: usize,
    },

    #[error("variable {var} out of range for a function of {n} variables")]
    VariableOutOfRange { var: usize, n: usize },

    #[error("interaction set {0} is not present in the function")]
    MissingInteraction(String),

    #[error("interaction set {0} has a proper superset in the function")]
    HasSuperset(String),

    #[error("interaction set family is not dense: {0} is missing a subset")]
    NotDense(String),

    #[error("interaction set {0} is not part of the source function")]
    NotSubset(String),

    #[error("variable {0} is not listed in the local table")]
    UnlistedVariable(usize),

    #[error("function of {n} variables is too large for exhaustive evaluation (limit {limit})")]
    TooManyVariables { n: usize, limit: usize },

    #[error("malformed POMM: {0}")]
    MalformedPomm(String),

    #[error("acceptance rate {rate:.3e} after {trials} trials is below the floor {floor:.3e}")]
    AcceptanceTooLow { rate: f64, trials: usize, floor: f64 },

    #[error("MLE bracket is empty in round {round}: {detail}")]
    EmptyInterval { round: usize, detail: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors raised by the dense-table resource guard.
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            Error::TableTooLarge { .. }
                | Error::NeighbourhoodTooLarge { .. }
                | Error::TooManyVariables { .. }
        )
    }
}
