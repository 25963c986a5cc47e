//! Seam for the plaintext training and inference branches, where the
//! computing parties see the data and prove correct execution with a
//! zero-knowledge proof of training or inference instead of running MPC.
//! No proof system is wired in, so every call reports `UnsupportedMode`.

use crate::error::{ArcError, Result};

pub trait ProofOfExecution {
    /// Proof that a model was trained on the committed data and randomness.
    fn prove_training(&self, commitments: &[u8]) -> Result<Vec<u8>>;
    fn verify_training(&self, commitments: &[u8], proof: &[u8]) -> Result<bool>;
    /// Proof that an answer was computed by the committed model.
    fn prove_inference(&self, commitments: &[u8]) -> Result<Vec<u8>>;
    fn verify_inference(&self, commitments: &[u8], proof: &[u8]) -> Result<bool>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Unavailable;

const WHY: &str = "plaintext branches need a zero-knowledge proof system";

impl ProofOfExecution for Unavailable {
    fn prove_training(&self, _: &[u8]) -> Result<Vec<u8>> {
        Err(ArcError::UnsupportedMode(WHY))
    }
    fn verify_training(&self, _: &[u8], _: &[u8]) -> Result<bool> {
        Err(ArcError::UnsupportedMode(WHY))
    }
    fn prove_inference(&self, _: &[u8]) -> Result<Vec<u8>> {
        Err(ArcError::UnsupportedMode(WHY))
    }
    fn verify_inference(&self, _: &[u8], _: &[u8]) -> Result<bool> {
        Err(ArcError::UnsupportedMode(WHY))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_call_is_unsupported() {
        let u = Unavailable;
        assert!(matches!(u.prove_training(b""), Err(ArcError::UnsupportedMode(_))));
        assert!(matches!(u.verify_inference(b"", b""), Err(ArcError::UnsupportedMode(_))));
    }
}
