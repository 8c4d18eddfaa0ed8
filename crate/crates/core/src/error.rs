use thiserror::Error;

/// Errors raised by the algebra routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("generator x{index} is out of range for {n_gens} generators")]
    UnknownGenerator { index: usize, n_gens: usize },

    #[error("star degree {requested} exceeds the truncation bound {bound}")]
    DegreeOutOfRange { requested: usize, bound: usize },

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("not a Lie element: {0}")]
    NotALieElement(String),

    #[error("product is not associative on basis triple ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),

    #[error("invalid bracket: {0}")]
    InvalidBracket(String),

    #[error("filtration is not multiplicative: {0}")]
    NotMultiplicative(String),

    #[error("map is not an endomorphism: {0}")]
    NotEndomorphism(String),

    #[error("map does not induce the identity modulo F_1: {0}")]
    NotIdentityModF1(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
}
