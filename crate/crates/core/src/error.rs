use thiserror::Error;

/// Errors produced by the emsrc toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate tangent frame: xhat and q are parallel (|xhat x q| = {0:e})")]
    DegenerateFrame(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported density: {0}")]
    UnsupportedDensity(String),

    #[error("observation point {0:?} lies inside or on a source support")]
    PointInsideSupport([f64; 3]),

    #[error("reference strengths are collinear: {0}")]
    CollinearReferences(String),

    #[error("degenerate reference points: |z1 - z2| = {0:e}")]
    DegenerateReferences(f64),

    #[error("missing record: {0}")]
    MissingRecord(String),

    #[error("indicator grids are defined on different lattices")]
    LatticeMismatch,

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
