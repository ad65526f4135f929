use thiserror::Error;

/// Errors raised while building or checking finite structures.
///
/// Failed checks (a square that does not commute, an equation that does not
/// hold) are reported as data, never through this type. An `Error` means the
/// inputs were ill-formed or a precondition was not met.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate element `{element}` in set `{set}`")]
    DuplicateElement { set: String, element: String },

    #[error("unknown element `{element}` in set `{set}`")]
    UnknownElement { set: String, element: String },

    #[error("set has {size} elements, above the configured cap of {cap}")]
    SetTooLarge { size: usize, cap: usize },

    #[error("empty set `{0}`")]
    EmptySet(String),

    #[error("{what} not total: no entry for `{missing}`")]
    NotTotal { what: String, missing: String },

    #[error("{what}: entry for `{element}` given twice")]
    DuplicateEntry { what: String, element: String },

    #[error("{what}: image index {index} outside codomain of size {size}")]
    ImageOutOfRange { what: String, index: usize, size: usize },

    #[error("type mismatch in {context}: expected {expected}, found {found}")]
    TypeMismatch {
        context: String,
        expected: String,
        found: String,
    },

    #[error("relation is not left-total: `{0}` has an empty image")]
    NotLeftTotal(String),

    #[error("row for `{row}` sums to {sum}, not 1")]
    NotNormalised { row: String, sum: String },

    #[error("negative weight {weight} in row `{row}`")]
    NegativeWeight { row: String, weight: String },

    #[error("function `{0}` is not surjective: `{1}` has no preimage")]
    NotSurjective(String, String),

    #[error("system is not autonomous: {0}")]
    NotAutonomous(String),

    #[error("subset is not forward-invariant: `{state}` leaves it under input `{input}`")]
    NotForwardInvariant { state: String, input: String },

    #[error("the empty subset cannot be an attracting subsystem of a non-empty system")]
    EmptyAttractor,

    #[error("factorisation is not bijective: {0}")]
    NotBijective(String),

    #[error("kernel is not deterministic: {0}")]
    NotDeterministic(String),

    #[error("map is not a model: {0}")]
    NotAModel(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported in this flavor: {0}")]
    Unsupported(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
