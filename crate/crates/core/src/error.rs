use thiserror::Error;

use crate::arcproto::PartyId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArcError {
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("polynomial division left a non-zero remainder")]
    NonZeroRemainder,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("degree overflow: {got} exceeds limit {limit}")]
    DegreeOverflow { got: usize, limit: usize },
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("malformed encoding: {0}")]
    Malformed(String),
    #[error("value outside the convertible range for {bits} bits")]
    Range { bits: u32 },
    #[error("field too small: need 2^{needed} < p")]
    FieldTooSmall { needed: u32 },
    #[error("fixed-point overflow")]
    Overflow,
    #[error("mpc abort at '{label}'{}", culprit.map(|c| format!(" (party {c} flagged)")).unwrap_or_default())]
    MpcAbort { label: String, culprit: Option<usize> },
    #[error("signature check failed for signer {0}")]
    BadSignature(usize),
    #[error("invalid key material")]
    InvalidKey,
    #[error("matrix is not symmetric positive definite")]
    NotSpd,
    #[error("singular system")]
    Singular,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("unsupported execution mode: {0}")]
    UnsupportedMode(&'static str),
    #[error("protocol abort at {phase}: {reason}")]
    Abort { phase: String, reason: String, culprit: Option<PartyId> },
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, ArcError>;

impl From<std::io::Error> for ArcError {
    fn from(e: std::io::Error) -> Self {
        ArcError::Io(e.to_string())
    }
}
