use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("geometry violation in element {element}: {reason}")]
    Geometry { element: usize, reason: String },

    #[error("interface trace mismatch: {0}")]
    TraceMismatch(String),

    #[error("quadrature degree {0} is not supported (expected 1..=10)")]
    UnsupportedDegree(usize),

    #[error("element {0} is not active in this space")]
    InactiveElement(usize),

    #[error("facet {0} does not have two active neighbours")]
    FacetNotInterior(usize),

    #[error("problem declares a flux jump but no flux-jump datum was supplied")]
    MissingFluxJump,

    #[error("index ({row}, {col}) out of range for dimension {n}")]
    IndexOutOfRange { row: usize, col: usize, n: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("solver did not reach tolerance {tol:e}: relative residual {residual:e}")]
    NotConverged { residual: f64, tol: f64 },

    #[error("report is empty")]
    EmptyReport,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
