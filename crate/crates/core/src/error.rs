use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("lattice rank must be positive")]
    ZeroRank,

    #[error("group closure exceeded {limit} elements")]
    NotFinite { limit: usize },

    #[error("generator {index} is not unimodular (|det| = {det})")]
    NotUnimodular { index: usize, det: String },

    #[error("character table verification failed: {0}")]
    LiftFailed(String),

    #[error("inner product {value} is not a non-negative integer")]
    NotIntegral { value: String },

    #[error("invalid generator index {0}")]
    InvalidGenerator(usize),

    #[error("module action is not a homomorphism at ({g}, {h})")]
    ActionMismatch { g: usize, h: usize },

    #[error("overlattice is not preserved by element {element}")]
    NotInvariant { element: usize },

    #[error("overlattice does not contain Z^n")]
    NotOverlattice,

    #[error("splitting tests disagree: realization={realization}, class_vanishes={class_vanishes}, fixed_point={fixed_point}")]
    SplittingDisagreement {
        realization: bool,
        class_vanishes: bool,
        fixed_point: bool,
    },

    #[error("no G-Hodge decomposition found: {0}")]
    NoDecomposition(String),

    #[error("crystallographic group is not even")]
    NotEven,

    #[error("invalid Hodge type: {0}")]
    InvalidHodgeType(String),

    #[error("invalid crystallographic group: {0}")]
    InvalidGroup(String),

    #[error("cochain complex too large ({0} coordinates)")]
    TooLarge(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal error: {0}")]
    Internal(String),
}
