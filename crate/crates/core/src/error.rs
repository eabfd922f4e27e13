use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("unsupported graph space: {0}")]
    UnsupportedSpace(String),

    #[error("invalid edge count {count} (space has {max} edge variables)")]
    InvalidEdgeCount { count: usize, max: usize },

    #[error("invalid dispersion{}: {message}", match .index { Some(i) => format!(" for graph {i}"), None => String::new() })]
    InvalidDispersion {
        index: Option<usize>,
        message: String,
    },

    #[error("inconsistent dyad census: {0}")]
    InconsistentCensus(String),

    #[error("invalid simplex point ({m}, {a}, {n})")]
    InvalidSimplex { m: f64, a: f64, n: f64 },

    #[error("infeasible density/reciprocity pair ({density}, {reciprocity})")]
    Infeasible { density: f64, reciprocity: f64 },

    #[error("graph space too large to enumerate: {edge_vars} edge variables (cap 24)")]
    SpaceTooLarge { edge_vars: usize },

    #[error("graph spaces do not match")]
    SpaceMismatch,

    #[error("zero statistic in graph {index}: {statistic}")]
    ZeroStatistic {
        index: usize,
        statistic: &'static str,
    },

    #[error("parameter constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("no draws available")]
    EmptyDraws,

    #[error("insufficient chains: {0}")]
    InsufficientChains(String),

    #[error("support violation at cell ({i}, {j}): {reason}")]
    SupportViolation { i: usize, j: usize, reason: String },

    #[error("observations are impossible under the fixed error rates at cell ({i}, {j})")]
    ImpossibleObservation { i: usize, j: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("mismatched data: {0}")]
    Mismatch(String),

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

pub type Result<T> = std::result::Result<T, Error>;
