use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("panel has {found} dates, at least {required} are required")]
    TooFewDates { found: usize, required: usize },

    #[error("dates must be strictly increasing (date row {row})")]
    DatesNotIncreasing { row: usize },

    #[error("price for {ticker:?} at date row {row} must be positive and finite, got {value}")]
    InvalidPrice { row: usize, ticker: String, value: f64 },

    #[error("non-finite {what} at ({row}, {col})")]
    NonFinite { what: &'static str, row: usize, col: usize },

    #[error("empty ticker at asset position {index}")]
    EmptyTicker { index: usize },

    #[error("duplicate ticker {0:?}")]
    DuplicateTicker(String),

    #[error("unknown asset class {0:?}")]
    UnknownAssetClass(String),

    #[error("{what}: expected {expected}, found {found}")]
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("window length {window} must be at least 2")]
    WindowTooShort { window: usize },

    #[error("window [{start}, {start}+{window}) exceeds the {available} available returns")]
    WindowOutOfRange {
        start: usize,
        window: usize,
        available: usize,
    },

    #[error("window step must be at least 1")]
    ZeroStep,

    #[error("asset {ticker:?} has zero variance in window {window_index}")]
    ZeroVariance {
        window_index: usize,
        asset: usize,
        ticker: String,
    },

    #[error("asset class selection is empty")]
    EmptyClassSelection,

    #[error("{found} assets selected, at least 2 are required")]
    TooFewAssets { found: usize },

    #[error(
        "correlation matrix of window {window_index} is not positive semidefinite (min eigenvalue {min_eigenvalue:e})"
    )]
    NotPositiveSemidefinite { window_index: usize, min_eigenvalue: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Q = {0} is below 1")]
    InvalidQ(f64),

    #[error("sigma^2 = {0} must be positive")]
    InvalidVariance(f64),

    #[error("rank {rank} outside 1..={n}")]
    RankOutOfRange { rank: usize, n: usize },

    #[error("eigenvalue {value:e} at rank {rank} is negative")]
    NegativeEigenvalue { rank: usize, value: f64 },

    #[error("baseline built for N = {expected}, decomposition has N = {found}")]
    BaselineMismatch { expected: usize, found: usize },

    #[error("adjusted component correlations have not been computed")]
    MissingAdjusted,

    #[error("invalid null configuration: {0}")]
    InvalidNullConfig(&'static str),

    #[error("invalid factor specification: {0}")]
    InvalidFactorSpec(&'static str),

    #[error("simulation {index} failed: {source}")]
    Simulation { index: u64, source: Box<Error> },
}
