use thiserror::Error;

/// Errors shared across the coding pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("observation points span only {span} dimensions, {required} required")]
    RankDeficient { span: usize, required: usize },

    #[error("observation {index} inconsistent with the interpolated polynomial")]
    Inconsistent { index: usize },

    #[error("field too small: need at least {needed} distinct labels, q = {q}")]
    FieldTooSmall { q: usize, needed: usize },

    #[error("{erased} erasures exceed the {max} this layer can correct")]
    TooManyErasures { erased: usize, max: usize },

    #[error("group {group} overwhelmed: {erased} erasures exceed delta-1 = {max}; run a full reconstruction instead")]
    GroupOverwhelmed {
        group: usize,
        erased: usize,
        max: usize,
    },

    #[error("configuration not certified optimal: {0}")]
    NotOptimalConfiguration(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("enumeration of C({n},{k}) patterns exceeds the budget of {budget}")]
    TooLarge { n: usize, k: usize, budget: u64 },

    #[error("worst-case generator preconditions not met: {0}")]
    ConditionsNotMet(String),
}

pub type Result<T> = std::result::Result<T, Error>;
