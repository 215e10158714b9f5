use thiserror::Error;

/// Errors raised by the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid poset: {0}")]
    InvalidPoset(String),
    #[error("map is not monotone: {0}")]
    NotMonotone(String),
    #[error("map is not a p-morphism: {0}")]
    NotPMorphism(String),
    #[error("map is not surjective")]
    NotSurjective,
    #[error("not an up-set: {0}")]
    NotUpSet(String),
    #[error("not an element of the algebra: {0}")]
    NotElement(String),
    #[error("set is not a subalgebra: {0}")]
    NotSubalgebra(String),
    #[error("invalid operation tables: {0}")]
    InvalidTables(String),
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("no isomorphism maps {0}")]
    NotIsomorphic(String),
    #[error("bound exceeded: {what} = {value} > {max}")]
    BoundExceeded { what: &'static str, value: usize, max: usize },
    #[error("mismatched objects: {0}")]
    Mismatch(String),
    #[error("superamalgam fallback exhausted up to {bound} points: {instance}")]
    FallbackExhausted { bound: usize, instance: String },
    #[error("term parse error at {pos}: {msg}")]
    TermParse { pos: usize, msg: String },
    #[error("unsupported term: {0}")]
    UnsupportedTerm(String),
    #[error("supports overlap at point {0}")]
    OverlappingSupports(usize),
    #[error("no witness found: {0}")]
    NoWitness(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed document: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
