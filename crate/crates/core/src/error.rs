use crate::rational::Rat;
use thiserror::Error;

/// Errors raised by constructors and by operations whose preconditions fail.
///
/// Axiom violations are not errors: checkers report them as verdicts with
/// witnesses. An `Error` means the input never described a well-formed
/// instance, or an operation was applied outside its stated domain.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("distance matrix must be {expected}x{expected}, found row count or row length {found}")]
    NonSquareMatrix { expected: usize, found: usize },
    #[error("negative distance {value} at ({from}, {to})")]
    NegativeDistance { from: String, to: String, value: Rat },
    #[error("coefficient K must be positive, got {0}")]
    NonPositiveCoeff(Rat),
    #[error("duplicate point identifier {0:?}")]
    DuplicatePoint(String),
    #[error("space must have at least one point")]
    EmptySpace,
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("operation requires axiom D1; diagonal entry at {0:?} is nonzero")]
    D1Required(String),
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(Rat),
    #[error("lambda must be nonnegative, got {0}")]
    NegativeLambda(Rat),
    #[error("sequence must contain at least one entry")]
    EmptySequence,
    #[error("C_alpha must be positive, got {0}")]
    NonPositiveCAlpha(Rat),
    #[error("C_beta must be nonnegative, got {0}")]
    NegativeCBeta(Rat),
    #[error("negative {matrix} entry {value} at ({from}, {to})")]
    NegativeMatrixEntry { matrix: &'static str, from: usize, to: usize, value: Rat },
    #[error("{what} is sized for {found} points but the space has {expected}")]
    ShapeMismatch { what: &'static str, expected: usize, found: usize },
    #[error("self-map must assign an image to every point; missing {0:?}")]
    IncompleteMap(String),
    #[error("max_steps must be at least 1")]
    ZeroBudget,
    #[error("unknown theorem profile {0:?}")]
    UnknownProfile(String),
    #[error("unknown Cauchy kind {0:?}; expected left_k, right_k or ds")]
    UnknownKind(String),
    #[error("unknown convergence mode {0:?}; expected d, dinv or ds")]
    UnknownMode(String),
    #[error("unknown completeness flag {0:?}")]
    UnknownFlag(String),
    #[error("generator config invalid: {0}")]
    InvalidGenConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
