use thiserror::Error;

/// Errors produced by the outage library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar function was evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model parameter violates one of its invariants.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A round index outside `1..=K`.
    #[error("round index {index} out of range 1..={rounds}")]
    IndexOutOfRange { index: usize, rounds: usize },

    /// The series would need more terms than the configured cap allows.
    #[error("series needs {required} terms, exceeding the cap of {cap} (set HARQ_TERM_CAP to raise it)")]
    TermCap { required: u128, cap: u64 },

    /// Input data that cannot support the requested estimate.
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
