//! Crate-wide error type.

/// Every fallible operation in the crate reports one of these.
#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("no square root: {0}")]
    NoSquareRoot(String),
    #[error("not a norm: {0}")]
    NotANorm(String),
    #[error("not regular semisimple")]
    NotRegularSemisimple,
    #[error("not on the nonsplit side")]
    WrongSide,
    #[error("m undefined (r=0 locus)")]
    MUndefined,
    #[error("non-integral input")]
    NonIntegral,
    #[error("unrealizable invariants: {0}")]
    Unrealizable(String),
    #[error("wrong case: {0}")]
    WrongCase(String),
    #[error("excluded case: {0}")]
    Excluded(String),
    #[error("not a degenerate base point")]
    NotDegenerate,
    #[error("Cayley transform undefined")]
    CayleyUndefined,
    #[error("pole at s=0")]
    PoleAtZero,
    #[error("no stabilization within shell window {0}")]
    NoStabilization(i64),
    #[error("conductor too small: {0}")]
    ConductorTooSmall(String),
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u32, u32),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
