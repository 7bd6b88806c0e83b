use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("atom count {0} outside the supported range")]
    AtomCount(usize),
    #[error("subset mask {mask:#x} does not fit in {n} atoms")]
    MaskRange { mask: u32, n: usize },
    #[error("utility vector must have strictly positive entries (entry {0} is zero)")]
    NonPositiveUtility(usize),
    #[error("subsets {a:?} and {b:?} have equal utility")]
    Tie { a: Vec<usize>, b: Vec<usize> },
    #[error("utility {0} already present in the vector")]
    Duplicate(String),
    #[error("utility vector is not strictly increasing")]
    NotSorted,
    #[error("malformed order: {0}")]
    Parse(String),
    #[error("cone axiom {axiom} violated: {detail}")]
    ConeAxiom { axiom: &'static str, detail: String },
    #[error("pair with empty lower side cannot be flipped")]
    EmptySide,
    #[error("pair is not flippable in this order")]
    NotFlippable,
    #[error("order is not representable")]
    NotRepresentable,
    #[error("orders are not flip-related")]
    NotNeighbors,
    #[error("trading transform sides differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("value {0} outside the admissible range {1}")]
    Range(String, String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("budget exhausted after {completed} records")]
    Resource { completed: usize },
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
