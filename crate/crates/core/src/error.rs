use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("missing subset entry {0} in measure table")]
    MissingSubset(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("node `{0}` has no incoming exposure, no capacity can be built")]
    NoCapacity(String),

    #[error("node `{0}` has no risk value")]
    MissingRiskValue(String),

    #[error("snapshot structure differs: {0}")]
    StructuralDrift(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("{path}:{line}: {msg}")]
    Schema { path: String, line: u64, msg: String },

    #[error("invalid quarter `{0}`, expected YYYY-Qn")]
    InvalidQuarter(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short stable identifier used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidMeasure(_) => "invalid_measure",
            Error::MissingSubset(_) => "missing_subset",
            Error::InvalidWeights(_) => "invalid_weights",
            Error::InvalidNetwork(_) => "invalid_network",
            Error::UnknownNode(_) => "unknown_node",
            Error::NoCapacity(_) => "no_capacity",
            Error::MissingRiskValue(_) => "missing_risk_value",
            Error::StructuralDrift(_) => "structural_drift",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::DegenerateFit(_) => "degenerate_fit",
            Error::InsufficientData(_) => "insufficient_data",
            Error::Schema { .. } => "schema",
            Error::InvalidQuarter(_) => "invalid_quarter",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
