use thiserror::Error;

/// Errors produced while designing schemes, assembling or analysing FVE solutions.
#[derive(Debug, Error)]
pub enum FveError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid scheme: {0}")]
    InvalidSpec(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0}")]
    MethodNotApplicable(String),

    #[error("parameter outside admissible domain: {0}")]
    Domain(String),

    #[error("unknown {kind} `{name}`")]
    UnknownPreset { kind: &'static str, name: String },

    #[error("ill-posed scheme: {0}")]
    IllPosedScheme(String),

    #[error("singular system at control-volume row {row}")]
    SingularSystem { row: usize },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("table mismatch: {0}")]
    ShapeMismatch(String),

    #[error("study level N={level} failed: {source}")]
    StudyLevel {
        level: usize,
        #[source]
        source: Box<FveError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl FveError {
    /// True for failures that come from the numerics rather than from bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            FveError::SingularSystem { .. }
            | FveError::Numerical(_)
            | FveError::IllPosedScheme(_) => true,
            FveError::StudyLevel { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, FveError>;
