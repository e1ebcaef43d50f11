use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("word has no generation")]
    NoGeneration,
    #[error("generation {requested} exceeds the available depth {available}")]
    Depth { requested: u64, available: u64 },
    #[error("odd generation {0}: the counterexample lives on even generations only")]
    OddGeneration(u128),
    #[error("model is not product-form; use the enumeration path")]
    NotProductForm,
    #[error("enumeration refused: generation {j} is above the cap {cap}")]
    EnumerationCap { j: usize, cap: usize },
    #[error("grid error: {0}")]
    Grid(String),
    #[error("case mismatch: {0}")]
    Case(String),
    #[error("degenerate map: {0}")]
    Degenerate(String),
    #[error("arithmetic overflow while building the schedule at stage {0}")]
    Overflow(u32),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
