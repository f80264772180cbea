use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("world space must contain at least one world")]
    EmptySpace,

    #[error("duplicate world label {0:?}")]
    DuplicateLabel(String),

    #[error("world index {index} out of range for {n} worlds")]
    WorldOutOfRange { index: usize, n: usize },

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("negative mass {value} at position {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("mass sums to {sum}")]
    NotNormalized { sum: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not a trust violation witness: {0}")]
    NotAWitness(String),

    #[error("degenerate box: {0}")]
    DegenerateBox(String),

    #[error("linear program for event {event} failed: {reason}")]
    Lp { event: String, reason: String },

    #[error("trust holds; no counterexample exists")]
    TrustHolds,

    #[error(
        "no bump weight made the gap positive at 5 standard errors \
         (best weight {best_weight}, gap {best_value} +/- {best_std_error})"
    )]
    SearchExhausted {
        best_weight: f64,
        best_value: f64,
        best_std_error: f64,
    },
}
