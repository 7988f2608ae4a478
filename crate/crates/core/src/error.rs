use thiserror::Error;

use crate::hall::HallReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex {0}")]
    UnknownVertex(u64),
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("vertex subset mixes both sides of the bipartition")]
    MixedSides,
    #[error("size cap {cap} is below the size floor {floor}")]
    BadCap { cap: usize, floor: usize },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid schedule: {0}")]
    BadSchedule(String),
    #[error("residual graph violates Hall's condition: {0}")]
    HallViolated(String),
    #[error("epsilon budget exhausted at stage {stage}")]
    BudgetExhausted { stage: usize },
    #[error("hypothesis failed: {reason}")]
    HypothesisFailed {
        reason: String,
        report: Option<Box<HallReport>>,
    },
    #[error("invalid letter {0:?} (expected one of a, A, b, B)")]
    BadLetter(char),
    #[error("base point is fixed by generator {0}")]
    FixedBase(String),
    #[error("two distinct words reach the same orbit point: {0} and {1}")]
    OrbitCollision(String, String),
    #[error("window margin {margin} is smaller than the required {required}")]
    MarginTooSmall { margin: usize, required: usize },
    #[error("invalid window: {0}")]
    BadWindow(String),
    #[error("invalid generating set: {0}")]
    BadGeneratingSet(String),
    #[error("interior vertex {0} is unmatched")]
    NotPerfectOnInterior(u64),
    #[error("ball of radius {radius} around {vertex} leaves the window")]
    BallTruncated { vertex: u64, radius: usize },
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("partial injection cannot be extended at {vertex}: {state}")]
    ExtensionStuck { vertex: u64, state: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    ///
    /// 2 marks a failed hypothesis or precondition, 3 an internal invariant
    /// breach, 1 everything that is a usage or input problem.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::HallViolated(_) | Error::ExtensionStuck { .. } | Error::OrbitCollision(..) => 3,
            Error::HypothesisFailed { .. }
            | Error::BudgetExhausted { .. }
            | Error::FixedBase(_)
            | Error::MarginTooSmall { .. }
            | Error::NotPerfectOnInterior(_)
            | Error::BallTruncated { .. }
            | Error::WindowTooSmall(_)
            | Error::BadCap { .. }
            | Error::MixedSides
            | Error::InvalidMatching(_) => 2,
            _ => 1,
        }
    }

    /// Stable upper-case code for JSON error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownVertex(_) => "UNKNOWN_VERTEX",
            Error::InvalidMatching(_) => "INVALID_MATCHING",
            Error::MixedSides => "MIXED_SIDES",
            Error::BadCap { .. } => "BAD_CAP",
            Error::InvalidGraph(_) => "INVALID_GRAPH",
            Error::BadSchedule(_) => "BAD_SCHEDULE",
            Error::HallViolated(_) => "HALL_VIOLATED",
            Error::BudgetExhausted { .. } => "BUDGET_EXHAUSTED",
            Error::HypothesisFailed { .. } => "HYPOTHESIS_FAILED",
            Error::BadLetter(_) => "BAD_LETTER",
            Error::FixedBase(_) => "FIXED_BASE",
            Error::OrbitCollision(..) => "ORBIT_COLLISION",
            Error::MarginTooSmall { .. } => "MARGIN_TOO_SMALL",
            Error::BadWindow(_) => "BAD_WINDOW",
            Error::BadGeneratingSet(_) => "BAD_GENERATING_SET",
            Error::NotPerfectOnInterior(_) => "NOT_PERFECT_ON_INTERIOR",
            Error::BallTruncated { .. } => "BALL_TRUNCATED",
            Error::WindowTooSmall(_) => "WINDOW_TOO_SMALL",
            Error::ExtensionStuck { .. } => "EXTENSION_STUCK",
            Error::Parse(_) => "PARSE",
            Error::Io(_) => "IO",
            Error::Json(_) => "JSON",
        }
    }
}
