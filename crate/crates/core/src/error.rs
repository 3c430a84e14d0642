use thiserror::Error;

/// Errors raised by the library.
///
/// Input problems (bad dimensions, out-of-range digits, violated hypotheses)
/// are distinguished from undecided searches and from internal consistency
/// failures, so front ends can map them to different exit codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("lattice point {0:?} is not in the semigroup NA")]
    NotInSemigroup(Vec<i64>),

    #[error("membership of {target:?} undecided up to weight cap {cap}")]
    Undecided { target: Vec<i64>, cap: u64 },

    #[error("lattice point {0:?} is not good")]
    NotGood(Vec<i64>),

    #[error("lattice point {0:?} is not very good")]
    NotVeryGood(Vec<i64>),

    #[error("U_M is empty")]
    EmptyUm,

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("exponent overflow")]
    Overflow,

    #[error("budget exceeded: {needed} evaluations requested, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
