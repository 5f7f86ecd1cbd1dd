use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("system index {index} out of range for register of {len} systems")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("control and target must differ (both {0})")]
    SameIndex(usize),

    #[error("index {0} listed more than once")]
    DuplicateIndex(usize),

    #[error("permutation arity {expected} does not match {actual} listed indices")]
    ArityMismatch { expected: usize, actual: usize },

    #[error("permutation table is not a bijection: {0}")]
    NotBijective(String),

    #[error("promise violation: {ones} ones out of {size} entries is neither constant nor balanced")]
    PromiseViolation { ones: u64, size: u64 },

    #[error("function is not balanced")]
    NotBalanced,

    #[error("register has {actual} input systems, oracle expects {expected}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("input {x} out of range for {n}-bit function")]
    InputOutOfRange { x: u64, n: usize },

    #[error("n = {n} exceeds the limit of {max} for {what}")]
    TooLarge { n: usize, max: usize, what: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}
