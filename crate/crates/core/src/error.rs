use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("model error: {0}")]
    Model(String),

    #[error("sequent contains a formula outside its closure context: {0}")]
    ContextViolation(String),

    #[error("rule instance fits no priority class")]
    Unclassifiable,

    #[error("position budget exhausted after {0} game positions")]
    ResourceLimit(usize),

    #[error("time budget exhausted")]
    Timeout,

    #[error("emitted artifact failed verification: {0}")]
    VerificationFailure(String),

    #[error("proof is not uniform: {0}")]
    NonUniformProof(String),

    #[error("missing exit interpolant for sequent {0}")]
    MissingExitInterpolant(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
