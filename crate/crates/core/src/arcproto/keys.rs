//! In-simulation key registry. Keys are derived from the scenario seed so
//! runs are reproducible.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::commit::sig::{KeyPair, PublicKey};
use crate::error::{ArcError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyCounts {
    pub data_holders: usize,
    pub train: usize,
    pub infer: usize,
    pub audit: usize,
}

impl Default for PartyCounts {
    fn default() -> Self {
        PartyCounts { data_holders: 2, train: 3, infer: 3, audit: 3 }
    }
}

impl PartyCounts {
    pub fn validate(&self) -> Result<()> {
        if self.data_holders == 0 {
            return Err(ArcError::InvalidParam("need at least one data holder".into()));
        }
        for (name, n) in [("train", self.train), ("infer", self.infer), ("audit", self.audit)] {
            if n < 2 {
                return Err(ArcError::InvalidParam(format!("{name} needs at least two computing parties")));
            }
        }
        Ok(())
    }
}

/// Sub-seed for a named purpose.
pub fn derive_seed(seed: u64, tag: &str, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(b"arc/seed/v1");
    h.update(seed.to_be_bytes());
    h.update((tag.len() as u32).to_be_bytes());
    h.update(tag.as_bytes());
    h.update(index.to_be_bytes());
    u64::from_be_bytes(h.finalize()[..8].try_into().expect("8 bytes"))
}

fn key(seed: u64, tag: &str, i: usize) -> KeyPair {
    KeyPair::from_seed(format!("{seed}/{tag}/{i}").as_bytes())
}

#[derive(Clone, Debug)]
pub struct KeyRing {
    pub dh: Vec<KeyPair>,
    pub tc: Vec<KeyPair>,
    pub ic: Vec<KeyPair>,
    pub owner: KeyPair,
}

impl KeyRing {
    pub fn derive(seed: u64, c: &PartyCounts) -> Self {
        KeyRing {
            dh: (0..c.data_holders).map(|i| key(seed, "dh", i)).collect(),
            tc: (0..c.train).map(|i| key(seed, "tc", i)).collect(),
            ic: (0..c.infer).map(|i| key(seed, "ic", i)).collect(),
            owner: key(seed, "m", 0),
        }
    }

    pub fn pki(&self) -> Pki {
        let pks = |ks: &[KeyPair]| ks.iter().map(|k| k.pk.clone()).collect();
        Pki { dh: pks(&self.dh), tc: pks(&self.tc), ic: pks(&self.ic), owner: self.owner.pk.clone() }
    }
}

/// Public keys everyone agrees on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pki {
    pub dh: Vec<PublicKey>,
    pub tc: Vec<PublicKey>,
    pub ic: Vec<PublicKey>,
    pub owner: PublicKey,
}

impl Pki {
    pub fn is_owner(&self, pk: &PublicKey) -> bool {
        *pk == self.owner
    }
}
