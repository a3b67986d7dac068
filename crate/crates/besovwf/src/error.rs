use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field contains non-finite samples")]
    NonFinite,
    #[error("unsupported Besov parameters: {0}")]
    UnsupportedParams(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("level {j} out of range 0..={max}")]
    LevelOutOfRange { j: usize, max: usize },
    #[error("empty lambda ladder")]
    EmptyLadder,
    #[error("lambda {0} below anti-aliasing floor {1}")]
    LambdaBelowFloor(f64, f64),
    #[error("insufficient cone sampling: cone holds {found} lattice frequencies, need {need}")]
    ConeSampling { found: usize, need: usize },
    #[error("too few usable fit points: {found}, need {need}")]
    TooFewFitPoints { found: usize, need: usize },
    #[error("point outside codomain of the map")]
    OutsideCodomain,
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
