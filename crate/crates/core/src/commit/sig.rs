//! ECDSA over secp256k1. The distributed signature of the computing parties
//! is emulated by one signature per party, all of which must verify.

use k256::ecdsa::signature::{Signer, Verifier};
use k256::ecdsa::{Signature as EcdsaSig, SigningKey, VerifyingKey};
use sha2::{Digest, Sha256};

use crate::error::{ArcError, Result};

pub const SIG_LEN: usize = 64;
pub const PK_LEN: usize = 33;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature(pub [u8; SIG_LEN]);

#[derive(Clone, Debug)]
pub struct KeyPair {
    sk: SigningKey,
    pub pk: PublicKey,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey(VerifyingKey);

impl PublicKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.to_encoded_point(true).as_bytes().to_vec()
    }

    pub fn from_bytes(b: &[u8]) -> Result<Self> {
        VerifyingKey::from_sec1_bytes(b).map(PublicKey).map_err(|_| ArcError::InvalidKey)
    }
}

impl KeyPair {
    /// Deterministic key from seed material.
    pub fn from_seed(seed: &[u8]) -> KeyPair {
        let mut ctr = 0u32;
        loop {
            let mut h = Sha256::new();
            h.update(b"arc/key/v1");
            h.update(seed);
            h.update(ctr.to_be_bytes());
            if let Ok(sk) = SigningKey::from_bytes(&h.finalize()) {
                let pk = PublicKey(*sk.verifying_key());
                return KeyPair { sk, pk };
            }
            ctr += 1;
        }
    }
}

pub fn sign(kp: &KeyPair, msg: &[u8]) -> Signature {
    let s: EcdsaSig = kp.sk.sign(msg);
    Signature(s.to_bytes().into())
}

pub fn verify(pk: &PublicKey, msg: &[u8], sig: &Signature) -> bool {
    EcdsaSig::from_slice(&sig.0).is_ok_and(|s| pk.0.verify(msg, &s).is_ok())
}

pub fn dist_sign_emulated(keys: &[KeyPair], msg: &[u8]) -> Vec<Signature> {
    keys.iter().map(|k| sign(k, msg)).collect()
}

/// Checks one signature per key. Reports the first failing signer.
pub fn verify_all(pks: &[PublicKey], msg: &[u8], sigs: &[Signature]) -> Result<()> {
    if pks.len() != sigs.len() {
        return Err(ArcError::BadSignature(pks.len().min(sigs.len())));
    }
    for (i, (pk, s)) in pks.iter().zip(sigs).enumerate() {
        if !verify(pk, msg, s) {
            return Err(ArcError::BadSignature(i));
        }
    }
    Ok(())
}
