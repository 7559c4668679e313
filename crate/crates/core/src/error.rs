//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point behind the camera (z = {z})")]
    BehindCamera { z: f64 },

    #[error("invalid camera intrinsics: {0}")]
    InvalidIntrinsics(String),

    #[error("invalid ROI: width and height must be positive (w = {w}, h = {h})")]
    InvalidRoi { w: f64, h: f64 },

    #[error("object extent must be positive in every dimension")]
    InvalidExtent,

    #[error("field of view must lie in (0, pi), got {0}")]
    InvalidFov(f64),

    #[error("distance must be positive, got {0}")]
    InvalidDistance(f64),

    #[error("mask resolution must be at least 8, got {0}")]
    MaskResolution(usize),

    #[error("mask resolutions differ: {a} vs {b}")]
    ResolutionMismatch { a: usize, b: usize },

    #[error("normalized code component must lie strictly inside (0, 1), got {0}")]
    CodeSaturated(f64),

    #[error("no silhouette evidence: the query mask is empty")]
    EmptySilhouette,

    #[error("viewpoint bank has no entries")]
    EmptyBank,

    #[error("azimuth step {0} does not evenly divide 360 degrees")]
    BankGrid(f64),

    #[error("point set is empty")]
    EmptyPointSet,

    #[error("error list is empty")]
    EmptyErrors,

    #[error("threshold must be positive, got {0}")]
    InvalidThreshold(f64),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("{path}:{line}: OBJ parse error: {msg}")]
    ObjParse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("symmetry config error: {0}")]
    SymmetryConfig(String),

    #[error("PGM error: {0}")]
    Pgm(String),

    #[error("CSV schema error: {0}")]
    Schema(String),

    #[error("scene error: {0}")]
    Scene(String),

    #[error("unknown class '{0}'")]
    UnknownClass(String),

    #[error("{path}: {source}")]
    IoAt {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Attach a path to a bare I/O error for more useful messages.
    pub fn io_at(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::IoAt {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
