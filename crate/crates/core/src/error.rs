use thiserror::Error;

use crate::polygraph::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("word {0} was not explored")]
    NotExplored(String),
    #[error("truncated region: {0} reaches an incompletely explored word")]
    TruncatedRegion(String),
    #[error("{to} is not reachable from {from}")]
    Unreachable { from: String, to: String },
    #[error("{qnf} is not a quasi-normal form of {word}")]
    NotQuasiNormalForm { word: String, qnf: String },
    #[error("no quasi-normal form given for {0}")]
    MissingQnfEntry(String),
    #[error("{0} has several reachable terminal components; pick a quasi-normal form explicitly")]
    AmbiguousQnf(String),
    #[error("no label for step {0}")]
    MissingTableEntry(String),
    #[error("label order is not well-founded: {0}")]
    IllFoundedOrder(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("loops are not rotations of each other")]
    NotEquivalent,
    #[error("no loop cell for the class of {0}")]
    MissingLoopClass(String),
    #[error("missing 3-cell: {0}")]
    MissingCell(String),
    #[error("ill-composed: {0}")]
    IllComposed(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("measure did not decrease: {0}")]
    MeasureNotDecreasing(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
