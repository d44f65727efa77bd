use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),
    #[error("argument {t} is outside the function domain (lower bound {low}, exclusive)")]
    OutOfDomain { t: f64, low: f64 },
    #[error("grid needs at least {needed} points, got {got}")]
    GridTooSmall { needed: usize, got: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("exponent k must lie in (0, 1), got {0}")]
    InvalidExponent(f64),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("distance matrix shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("duplicate point {0}")]
    DuplicatePoint(String),
    #[error("operation needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("invalid self-map: {0}")]
    InvalidMap(String),
    #[error("tau must be positive, got {0}")]
    InvalidTau(String),
    #[error("no eligible pairs: every pair has coinciding images")]
    NoEligiblePairs,
    #[error("condition (C1) violated at t = {t}, s = {s} (margin {margin})")]
    C1Violated { t: f64, s: f64, margin: f64 },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("no right jump at t0 = {t0}: estimated jump {tau}")]
    NoRightJump { t0: f64, tau: f64 },
    #[error("function is not nondecreasing: f({a}) > f({b})")]
    NotNondecreasing { a: f64, b: f64 },
    #[error("point collision between A and B sets at {0}")]
    PointCollision(String),
    #[error("exact arithmetic unavailable: {0}")]
    ExactUnavailable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("function iterates live on different grids ({0} vs {1} points)")]
    GridMismatch(usize, usize),
    #[error("Picard iteration diverged at iteration {iteration} (step {step})")]
    Diverged { iteration: usize, step: f64 },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
