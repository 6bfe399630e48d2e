use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cut out of range: {0}")]
    CutOutOfRange(String),
    #[error("cuts must be strictly increasing")]
    UnsortedCuts,
    #[error("interval must have unit length, got {0}")]
    NonUnitInterval(String),
    #[error("invalid rational {0:?}")]
    ParseRational(String),
    #[error("malformed density: {0}")]
    Density(String),

    #[error("circuit structure: {0}")]
    Circuit(String),
    #[error("input matrix has wrong shape: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("grid: {0}")]
    Grid(String),
    #[error("point {0:?} lies outside the grid")]
    PointOutOfGrid(Vec<usize>),
    #[error("not a cover")]
    NotACover,
    #[error("labelling is not antipodal at {0:?}")]
    NotAntipodal(Vec<usize>),

    #[error("pad first: width {0} is not of the form 3s+1")]
    PadFirst(usize),
    #[error("parity violation: odd width {width} in dimension {dim}")]
    ParityViolation { dim: usize, width: usize },
    #[error("solution touches a cap at {0:?}")]
    CapPoint(Vec<usize>),
    #[error("instance too large for explicit folding: {0}")]
    TooLarge(String),

    #[error("epsilon out of range: {0} (must satisfy 0 <= epsilon < 1/5)")]
    EpsilonOutOfRange(String),
    #[error("layout: {0}")]
    Layout(String),
    #[error("plan not found: {0}")]
    PlanNotFound(String),
    #[error("feedback agent for dimension {dim} unbalanced: discrepancy {discrepancy}")]
    Unbalanced { dim: usize, discrepancy: String },
    #[error("synthesis: {0}")]
    Synthesis(String),
    #[error("no cover extracted")]
    NoCoverExtracted,

    #[error("format: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
