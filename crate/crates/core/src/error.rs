use thiserror::Error;

/// Errors raised by jet arithmetic, the recursion and the verifiers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WtcError {
    #[error("jets expanded about different base points ({left} vs {right})")]
    BaseMismatch { left: f64, right: f64 },

    /// A derivative was requested from a jet with nothing left to differentiate.
    /// Raised inside the recursion it means the initial order budget was too small.
    #[error("insufficient jet order: {context} needs order {needed}, have {available}")]
    InsufficientOrder {
        context: String,
        needed: usize,
        available: usize,
    },

    #[error("{name} must be real-valued (coefficient {index} has imaginary part {imag:e})")]
    NotRealValued {
        name: String,
        index: usize,
        imag: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A compatibility or conjugacy identity failed beyond tolerance. Under the
    /// admissible potential form these hold identically, so this indicates a bug.
    #[error("internal inconsistency: {check} defect {defect:e} exceeds tolerance {tolerance:e}")]
    Inconsistent {
        check: String,
        defect: f64,
        tolerance: f64,
    },

    #[error("invalid grid: {0}")]
    Grid(String),
}

pub type Result<T, E = WtcError> = std::result::Result<T, E>;
