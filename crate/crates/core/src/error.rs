use thiserror::Error;

use crate::datum::Edge;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("polygon {polygon} has non-positive size {size}")]
    NonPositiveSize { polygon: usize, size: i64 },
    #[error("polygon {polygon}: expected {expected} gradings, found {found}")]
    GradingLengthMismatch { polygon: usize, expected: usize, found: usize },
    #[error("side {0} has more than one partner")]
    DuplicatePartner(Edge),
    #[error("side {0} has no partner and is not fixed")]
    MissingPartner(Edge),
    #[error("index ({i},{j}) is outside the datum")]
    IndexOutOfPolygon { i: i64, j: i64 },
    #[error("letters {0} and {next} are not adjacent", next = .0 + 1)]
    BrokenAdjacency(usize),
    #[error("periodic word is a power of a shorter word")]
    NonMinimalPeriod,
    #[error("bad letter: {0}")]
    BadLetter(String),
    #[error("rotation is only defined for periodic words")]
    RotateOnFinite,
    #[error("expected {expected} taggings, found {found}")]
    TagCountMismatch { expected: usize, found: usize },
    #[error("asymmetric periodic words are bands, not arcs")]
    BandNotArc,
    #[error("word is not an arc word: {0}")]
    NotArcObject(String),
    #[error("local system does not fit the word class")]
    IncompatibleLocalSystem,
    #[error("invalid marker")]
    InvalidMarker,
    #[error("morphism is not a degree-0 cocycle")]
    NotACocycle,
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("segment pair does not fit the requested case")]
    CaseMismatch,
    #[error("characteristic must be an odd prime, got {0}")]
    BadPrime(u64),
}

pub type Result<T> = std::result::Result<T, Error>;
