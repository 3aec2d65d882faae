use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("stacking sequence is empty")]
    EmptyStack,

    #[error("ply angle {0} deg is outside (-90, 90]")]
    AngleOutOfRange(i32),

    #[error("ply index {index} out of range for a {plies}-ply laminate")]
    PlyIndexOutOfRange { index: usize, plies: usize },

    #[error("membrane is not orthotropic: Phi0 - Phi1 is {offset_deg:.4} deg away from a multiple of 45 deg")]
    NotOrthotropic { offset_deg: f64 },

    #[error("buckling eigenvalue must be positive, got {0}")]
    NonPositiveEigenvalue(f64),

    #[error("adjacency edge ({0}, {1}) references an unknown panel")]
    DanglingEdge(String, String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty element set")]
    EmptyElementSet,

    #[error("material has no strength polar parameters")]
    MissingStrength,

    #[error("invalid blending scheme: {0}")]
    InvalidScheme(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("dataset `{name}` checksum mismatch (expected {expected}, found {found})")]
    ChecksumMismatch {
        name: String,
        expected: String,
        found: String,
    },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
