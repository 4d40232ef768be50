use thiserror::Error;

/// Errors surfaced by cone constructions and verification runs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid block parameters: {}", .0.join("; "))]
    BlockParams(Vec<String>),

    #[error("value out of supported range: {0}")]
    Overflow(String),

    #[error("work limit {limit} exceeded while {context}")]
    WorkLimit { limit: u64, context: String },

    #[error("block poisoned: ladder map at level {level} is not an order-embedding (witness {witness})")]
    Poisoned { level: usize, witness: u64 },

    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),

    #[error("monotone presentation violated at generator {index}: {detail}")]
    Monotonicity { index: usize, detail: String },

    #[error("multiplier sequence exhausted: {0}")]
    SequenceExhausted(String),

    #[error("unverified system: {0}")]
    Unverified(String),
}
