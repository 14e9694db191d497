use thiserror::Error;

use crate::algebra::{LawViolation, SquareViolation};
use crate::equational::{EquationViolation, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("table has length {len}, expected {expected}")]
    TableLength { len: usize, expected: usize },

    #[error("table entry {value} at index {index} is outside a codomain of size {cod}")]
    EntryOutOfRange {
        index: usize,
        value: usize,
        cod: usize,
    },

    #[error("no map exists from a set of size {dom} into the empty set")]
    EmptyCodomain { dom: usize },

    #[error("cannot compose: codomain of size {cod} does not match domain of size {dom}")]
    CompositionMismatch { cod: usize, dom: usize },

    #[error("codec mismatch: {0}")]
    CodecMismatch(String),

    #[error("element {element} is out of range for a set of size {size}")]
    ElementOutOfRange { element: usize, size: usize },

    #[error("object too large to encode: {0}")]
    Overflow(String),

    #[error("refusing to build a table with {size} entries (limit {limit})")]
    TableTooLarge { size: u128, limit: usize },

    #[error("the state set is empty; this construction needs a chosen element s0")]
    MissingPoint,

    #[error("the state set must be nonempty: the monadicity theorems assume S has an element")]
    EmptyState,

    #[error("search ceiling exceeded: {work} units of work requested, ceiling is {ceiling}")]
    CeilingExceeded { work: u128, ceiling: u64 },

    #[error("not a T-algebra: {0}")]
    NotAnAlgebra(LawViolation),

    #[error("not a model of the lookup/update equations: {0}")]
    NotASigmaAlgebra(EquationViolation),

    #[error("not an algebra morphism: {0}")]
    NotAMorphism(SquareViolation),

    #[error("ill-defined induced map: ({first:?}) and ({second:?}) share an e-fiber but land on {first_image} and {second_image}")]
    FiberCollision {
        first: (usize, usize),
        second: (usize, usize),
        first_image: usize,
        second_image: usize,
    },

    #[error("internal invariant broken: {0}")]
    Internal(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("variable x{index} is unbound (only {nvars} variables in scope)")]
    UnboundVariable { index: usize, nvars: usize },
}
