use std::path::PathBuf;

/// Errors produced anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("non-positive price {value} for stock {stock} on day {day}")]
    NonPositivePrice {
        stock: String,
        day: String,
        value: f64,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("too few observations for q bins (got {len}, need at least {q})")]
    TooFewObservations { len: usize, q: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("inconsistent entropies: mutual information {0} is negative")]
    InconsistentEntropies(f64),

    #[error("degenerate similarity matrix: all stock weights are zero")]
    DegenerateSimilarity,

    #[error("cascade rounding produced negative degree {degree} at position {position}")]
    NegativeDegree { position: usize, degree: i64 },

    #[error("total edge weight is zero")]
    ZeroTotalWeight,

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("missing sector for stock {0}")]
    MissingSector(String),

    #[error("no cliques")]
    NoCliques,

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by invalid user input (bad files, bad parameters).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::Eigen(_) | Error::Json(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
