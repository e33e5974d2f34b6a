use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial is not monic (leading coefficient {0})")]
    NotMonic(i64),
    #[error("polynomial factors over the rationals")]
    Reducible,
    #[error("degree {degree} exceeds the configured cap {cap}")]
    DegreeTooLarge { degree: usize, cap: usize },
    #[error("empty or constant polynomial")]
    EmptyPolynomial,
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("element of length {found} does not belong to an order of degree {expected}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("operands belong to different orders")]
    OrderMismatch,
    #[error("the zero element generates no nonzero ideal")]
    ZeroElement,
    #[error("lattice is not an ideal: {0}")]
    NotAnIdeal(&'static str),
    #[error("ideals are not coprime")]
    NotCoprime,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = {0}: p^2 divides the discriminant and the order is not asserted maximal")]
    UnsafePrime(u64),
    #[error("empty family")]
    EmptyFamily,
    #[error("family contains a non-proper ideal (norm 1)")]
    UnitIdeal,
    #[error("family contains a duplicate ideal")]
    DuplicateIdeal,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("box of {points} points exceeds the point budget {budget}")]
    SizeOverflow { points: u128, budget: u64 },
    #[error("pattern sets are not disjoint")]
    NotDisjoint,
    #[error("no interior positions for the requested shape")]
    EmptyInterior,
    #[error("computation needs {needed} terms, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("fiber at level {0} is not a singleton")]
    Inconclusive(usize),
    #[error("window cache: {0}")]
    Cache(String),
    #[error("window cache was written for a different configuration")]
    CacheMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
