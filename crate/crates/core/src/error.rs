use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid graphon: {0}")]
    InvalidGraphon(String),
    #[error("host graph has no vertices")]
    EmptyHost,
    #[error("host part {0} is empty")]
    EmptyHostPart(usize),
    #[error("{what}: n = {n} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("exact cut norm needs at most {cap} parts, got {parts}")]
    TooManyParts { parts: usize, cap: usize },
    #[error("common equal-length refinement needs {parts} parts, cap is {cap}")]
    RefinementTooLarge { parts: usize, cap: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no sign change found on the {0}-point grid")]
    NoBracket(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
